"""Truncated signatures of piecewise linear paths.

The closed form for one linear segment (level k = beta^{(x)k} dt^k / k!)
is folded over the segments with Chen's identity.  A slow left-Riemann
discretization of the nested integrals is provided as an independent
oracle for the tests.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._backend import outer_accum
from .errors import AssumptionViolation
from .tensor_algebra import (
    TensorLevel,
    TruncatedSignature,
    check_allocation,
)

# Angles within this tolerance of 0 or pi raise the assumption flags.
ANGLE_TOL = 1e-9

# Work cap for the Riemann oracle (steps * d**depth terms).
_ORACLE_WORK_CAP = 10**8


@dataclass(frozen=True)
class PiecewiseLinearPath:
    """Ordered points in R^d with strictly increasing times in [0, 1].

    Times default to the uniform grid i/M when not provided.
    """

    points: np.ndarray
    times: np.ndarray | None = None

    def __post_init__(self):
        pts = np.atleast_2d(np.asarray(self.points, dtype=np.float64))
        if pts.ndim != 2 or pts.shape[0] < 2:
            raise ValueError("a path needs at least 2 points in R^d")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)
        m = pts.shape[0] - 1
        if self.times is None:
            t = np.linspace(0.0, 1.0, m + 1)
        else:
            t = np.asarray(self.times, dtype=np.float64)
            if t.shape != (m + 1,):
                raise ValueError("times must have one entry per point")
            if np.any(np.diff(t) <= 0):
                raise ValueError("times must be strictly increasing")
        t.setflags(write=False)
        object.__setattr__(self, "times", t)

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    @property
    def num_segments(self) -> int:
        return self.points.shape[0] - 1

    def translated(self, offset) -> "PiecewiseLinearPath":
        return PiecewiseLinearPath(self.points + np.asarray(offset), self.times)

    def scaled(self, alpha: float) -> "PiecewiseLinearPath":
        return PiecewiseLinearPath(alpha * self.points, self.times)


def merge_degenerate(path: PiecewiseLinearPath) -> PiecewiseLinearPath:
    """Drop consecutive duplicate points; they carry the identity signature."""
    pts, t = path.points, path.times
    keep = [0]
    for i in range(1, pts.shape[0]):
        if not np.array_equal(pts[i], pts[keep[-1]]):
            keep.append(i)
    if len(keep) == len(pts):
        return path
    if len(keep) < 2:
        # all points equal: keep the two endpoints of a zero segment
        return PiecewiseLinearPath(pts[[0, -1]], t[[0, -1]])
    return PiecewiseLinearPath(pts[keep], t[keep])


@dataclass(frozen=True)
class SegmentGeometry:
    """Slopes, lengths, kink angles and assumption flags of a path.

    Angles follow the vertex convention: omega_i is the angle at breakpoint
    i between the rays back along the incoming segment and forward along
    the outgoing one, so a straight continuation has omega = pi and an
    exact backtrack has omega = 0 (the convention the kink-loss constant
    K(omega) is stated in).
    """

    slopes: np.ndarray          # (M, d) slopes beta_i
    lengths: np.ndarray         # (M,) segment lengths |beta_i| dt_i
    total_variation: float      # ell
    angles: np.ndarray          # (M-1,) vertex angles omega_i in [0, pi]
    min_angle: float            # min_i omega_i; pi when M == 1
    non_minimal_partition: bool  # some omega_i == pi (collinear pieces)
    tree_like_backtrack: bool    # some omega_i == 0 (path retraces itself)


def segment_geometry(path: PiecewiseLinearPath) -> SegmentGeometry:
    path = merge_degenerate(path)
    dt = np.diff(path.times)
    disp = np.diff(path.points, axis=0)
    slopes = disp / dt[:, None]
    lengths = np.linalg.norm(disp, axis=1)
    nz = lengths > 0
    if not np.any(nz):
        raise ValueError("path has no non-degenerate segment")
    slopes, lengths, disp = slopes[nz], lengths[nz], disp[nz]
    m = len(lengths)
    if m > 1:
        unit = disp / lengths[:, None]
        # vertex angle: between -incoming and +outgoing directions
        cosines = np.clip(-np.sum(unit[:-1] * unit[1:], axis=1), -1.0, 1.0)
        angles = np.arccos(cosines)
        min_angle = float(angles.min())
    else:
        angles = np.empty(0)
        min_angle = math.pi
    return SegmentGeometry(
        slopes=slopes,
        lengths=lengths,
        total_variation=float(lengths.sum()),
        angles=angles,
        min_angle=min_angle,
        non_minimal_partition=bool(np.any(angles > math.pi - ANGLE_TOL)),
        tree_like_backtrack=bool(np.any(angles < ANGLE_TOL)),
    )


def require_clean_angles(geom: SegmentGeometry) -> None:
    """Raise when the minimal-partition / reduced-path assumption fails."""
    if geom.non_minimal_partition:
        raise AssumptionViolation(
            "consecutive collinear segments (vertex angle pi): "
            "partition not minimal"
        )
    if geom.tree_like_backtrack:
        raise AssumptionViolation(
            "exact backtracking segment (vertex angle 0): path is not reduced"
        )


def linear_signature(beta, dt: float, depth: int) -> TruncatedSignature:
    """Signature of the linear segment t -> beta * t over an interval of
    length dt: level k equals beta^{(x)k} dt^k / k!."""
    beta = np.asarray(beta, dtype=np.float64).ravel()
    d = beta.size
    if dt <= 0:
        raise ValueError("dt must be positive")
    check_allocation(d, depth)
    levels = [TensorLevel.scalar(d, 1.0)]
    cur = np.array([1.0])
    for k in range(1, depth + 1):
        nxt = np.zeros(cur.size * d)
        outer_accum(nxt, cur, beta * (dt / k))
        levels.append(TensorLevel(d, k, nxt))
        cur = nxt
    return TruncatedSignature(d, depth, tuple(levels))


def chen_concat(a: TruncatedSignature, b: TruncatedSignature) -> TruncatedSignature:
    """Chen's identity: level n of the concatenation is
    sum_k a_k (x) b_{n-k}."""
    if a.dim != b.dim or a.depth != b.depth:
        raise ValueError("signatures must share dim and depth")
    d = a.dim
    levels = [TensorLevel.scalar(d, float(a.level(0)[0] * b.level(0)[0]))]
    for n in range(1, a.depth + 1):
        out = np.zeros(d**n)
        for k in range(n + 1):
            outer_accum(out, a.level(k), b.level(n - k))
        levels.append(TensorLevel(d, n, out))
    return TruncatedSignature(d, a.depth, tuple(levels))


def path_signature(path: PiecewiseLinearPath, depth: int) -> TruncatedSignature:
    """Left fold of per-segment closed forms under Chen's identity.

    Cost O(M d^depth); level 1 equals the endpoint displacement.
    """
    if depth < 0:
        raise ValueError("depth must be >= 0")
    path = merge_degenerate(path)
    check_allocation(path.dim, depth + 1)
    dt = np.diff(path.times)
    disp = np.diff(path.points, axis=0)
    sig = None
    for i in range(len(dt)):
        if not np.any(disp[i]):
            continue
        seg = linear_signature(disp[i] / dt[i], dt[i], depth)
        sig = seg if sig is None else chen_concat(sig, seg)
    if sig is None:
        return TruncatedSignature.trivial(path.dim, depth)
    return sig


def restrict(path: PiecewiseLinearPath, u: float, v: float) -> PiecewiseLinearPath:
    """The path restricted to [u, v], with interpolated endpoints."""
    t, pts = path.times, path.points
    if not t[0] <= u < v <= t[-1]:
        raise ValueError("need t0 <= u < v <= tM")

    def point_at(s):
        return np.array([np.interp(s, t, pts[:, j]) for j in range(path.dim)])

    inner = (t > u) & (t < v)
    new_t = np.concatenate(([u], t[inner], [v]))
    new_p = np.vstack([point_at(u), pts[inner], point_at(v)])
    return PiecewiseLinearPath(new_p, new_t)


def constant_speed_reparam(path: PiecewiseLinearPath) -> PiecewiseLinearPath:
    """Replace the times so that every slope has norm ell (the length)."""
    path = merge_degenerate(path)
    seg_len = np.linalg.norm(np.diff(path.points, axis=0), axis=1)
    ell = seg_len.sum()
    if ell <= 0:
        raise ValueError("zero-length path cannot be reparameterized")
    u = np.concatenate(([0.0], np.cumsum(seg_len) / ell))
    u[-1] = 1.0
    return PiecewiseLinearPath(path.points, u)


def riemann_oracle(path: PiecewiseLinearPath, depth: int,
                   steps: int) -> TruncatedSignature:
    """Brute-force signature via left-Riemann sums over the simplex.

    Each level-k coefficient is approximated by
    sum_{m_1 < ... < m_k} dX_{m_1}^{i_1} ... dX_{m_k}^{i_k} over a uniform
    grid of ``steps`` increments, evaluated with prefix sums.  Error
    O(1/steps).  Test oracle only; independent of the Chen route.
    """
    if steps < 10:
        raise ValueError("need steps >= 10")
    d = path.dim
    if steps * d**depth > _ORACLE_WORK_CAP:
        raise ValueError("steps**depth grid infeasible: lower steps or depth")
    t0, t1 = path.times[0], path.times[-1]
    grid = np.linspace(t0, t1, steps + 1)
    samples = np.column_stack(
        [np.interp(grid, path.times, path.points[:, j]) for j in range(d)]
    )
    dX = np.diff(samples, axis=0)  # (steps, d)
    levels = [TensorLevel.scalar(d, 1.0)]
    # prefix[m] = level-k signature over the first m increments (strict order)
    prefix = np.ones((steps + 1, 1))
    for k in range(1, depth + 1):
        terms = np.einsum("mi,mj->mij", prefix[:-1], dX).reshape(steps, -1)
        prefix = np.vstack([np.zeros((1, d**k)), np.cumsum(terms, axis=0)])
        levels.append(TensorLevel(d, k, prefix[-1].copy()))
    return TruncatedSignature(d, depth, tuple(levels))
