"""Hyperbolic development of piecewise linear paths.

A path in R^d is transported to the isometry group of the hyperboloid
{B(y, y) = -1} in R^{d+1}, where B(x, y) = sum_{i<=d} x_i y_i - x_{d+1} y_{d+1},
by the linear controlled equation dGamma = F(dX) Gamma.  On one linear
segment the transport is the matrix exponential of F(v), which has the
closed form

    exp(F(v)) = I + sinh(|v|)/|v| F(v) + (cosh(|v|) - 1)/|v|^2 F(v)^2

because F(v)^3 = |v|^2 F(v) (F(v)^2 is block-diagonal with blocks v v^T and
|v|^2; the identity is exercised against a generic matrix exponential in
the tests).  Kinks lose at most K(omega) = log(2 / (1 - cos(omega/2))) of
hyperbolic distance each, which yields the operator-norm lower bound
||Gamma_1^alpha|| >= exp(alpha - (M-1) K(omega)) checked here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import AssumptionViolation
from .signature import (
    PiecewiseLinearPath,
    SegmentGeometry,
    merge_degenerate,
    require_clean_angles,
    segment_geometry,
)
from .tensor_algebra import TruncatedSignature

_B_TOL = 1e-9


def minkowski_b(x, y) -> float:
    """B(x, y) = sum_{i<=d} x_i y_i - x_{d+1} y_{d+1}."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    return float(x[:-1] @ y[:-1] - x[-1] * y[-1])


def hyperbolic_distance(x, y) -> float:
    """arcosh(-B(x, y)), with the argument clamped to >= 1 against ulps."""
    return math.acosh(max(1.0, -minkowski_b(x, y)))


def basepoint(dim: int) -> np.ndarray:
    """y0 = (0, ..., 0, 1), the hyperboloid point over the origin."""
    y0 = np.zeros(dim + 1)
    y0[-1] = 1.0
    return y0


@dataclass(frozen=True)
class DevelopmentMatrix:
    """A (d+1) x (d+1) element of the B-isometry group."""

    dim: int
    entries: np.ndarray

    def __post_init__(self):
        e = np.asarray(self.entries, dtype=np.float64)
        if e.shape != (self.dim + 1, self.dim + 1):
            raise ValueError("entries must be (d+1) x (d+1)")
        e.setflags(write=False)
        object.__setattr__(self, "entries", e)

    def __matmul__(self, other: "DevelopmentMatrix") -> "DevelopmentMatrix":
        return DevelopmentMatrix(self.dim, self.entries @ other.entries)

    def apply(self, y) -> np.ndarray:
        return self.entries @ np.asarray(y, dtype=np.float64)

    def operator_norm(self) -> float:
        return float(np.linalg.svd(self.entries, compute_uv=False)[0])

    def b_defect(self) -> float:
        """Max |B(G e_i, G e_j) - B(e_i, e_j)| over the canonical basis."""
        g = np.diag(np.append(np.ones(self.dim), -1.0))
        return float(np.max(np.abs(self.entries.T @ g @ self.entries - g)))


def f_map(y) -> np.ndarray:
    """The symmetric (d+1) x (d+1) matrix with last column (y, 0) and last
    row (y^T, 0); its operator norm equals |y|."""
    y = np.asarray(y, dtype=np.float64).ravel()
    d = y.size
    out = np.zeros((d + 1, d + 1))
    out[:-1, -1] = y
    out[-1, :-1] = y
    return out


def segment_transport(v) -> DevelopmentMatrix:
    """exp(F(v)) in closed form; the identity for v = 0."""
    v = np.asarray(v, dtype=np.float64).ravel()
    d = v.size
    r = float(np.linalg.norm(v))
    eye = np.eye(d + 1)
    if r == 0.0:
        return DevelopmentMatrix(d, eye)
    f = f_map(v)
    m = eye + (math.sinh(r) / r) * f + ((math.cosh(r) - 1.0) / r**2) * (f @ f)
    return DevelopmentMatrix(d, m)


def develop(path: PiecewiseLinearPath) -> DevelopmentMatrix:
    """Gamma_1: ordered product of per-segment transports (last segment
    leftmost)."""
    return develop_checkpoints(path)[-1]


def develop_checkpoints(path: PiecewiseLinearPath) -> list[DevelopmentMatrix]:
    """Gamma at every breakpoint, starting from the identity."""
    path = merge_degenerate(path)
    d = path.dim
    out = [DevelopmentMatrix(d, np.eye(d + 1))]
    for dx in np.diff(path.points, axis=0):
        out.append(segment_transport(dx) @ out[-1])
    return out


def k_of_omega(omega: float) -> float:
    """K(omega) = log(2 / (1 - cos(omega/2))), the per-kink distance loss."""
    if not 0.0 < omega <= math.pi:
        raise ValueError("omega must lie in (0, pi]")
    return math.log(2.0 / (1.0 - math.cos(omega / 2.0)))


@dataclass(frozen=True)
class BoundReport:
    """Evaluated operator-norm lower bound for one developed path."""

    omega: float             # smallest turning angle (pi for one segment)
    K_omega: float
    n1: int                  # floor(4 exp(2 (M-1) K(omega)))
    alpha: float             # scaling applied to the unit-length path
    lhs: float               # exp(alpha - (M-1) K(omega))
    rhs: float               # operator norm of Gamma_1 of alpha * X
    satisfied: bool          # lhs <= rhs (up to 1e-9 relative slack)
    segments: int
    shortest_segment: float


def norm_lower_bound_check(path: PiecewiseLinearPath,
                           alpha: float) -> BoundReport:
    """Evaluate exp(alpha - (M-1) K(omega)) <= ||Gamma_1^alpha||.

    The path must have total variation 1 (normalize with
    constant_speed_reparam and scaling first) and clean angles; alpha must
    exceed K(omega)/D where D is the shortest segment length, so that every
    developed geodesic segment is longer than K(omega).
    """
    geom = segment_geometry(path)
    if abs(geom.total_variation - 1.0) > 1e-8:
        raise ValueError(
            f"path must be normalized to total variation 1, got "
            f"{geom.total_variation}"
        )
    require_clean_angles(geom)
    m = len(geom.lengths)
    omega = geom.min_angle
    k = k_of_omega(omega)
    shortest = float(geom.lengths.min())
    alpha_min = k / shortest
    if alpha <= alpha_min:
        raise AssumptionViolation(
            f"alpha={alpha} too small: need alpha > K(omega)/D = {alpha_min}"
        )
    gamma = develop(path.scaled(alpha))
    lhs = math.exp(alpha - (m - 1) * k)
    rhs = gamma.operator_norm()
    return BoundReport(
        omega=omega,
        K_omega=k,
        n1=int(4.0 * math.exp(2.0 * (m - 1) * k)),
        alpha=alpha,
        lhs=lhs,
        rhs=rhs,
        satisfied=lhs <= rhs * (1.0 + _B_TOL),
        segments=m,
        shortest_segment=shortest,
    )


def chen_lower_bound_chain(sig: TruncatedSignature, alpha: float) -> float:
    """1 + sum_k alpha^k * euclidean_norm(level k), truncated at sig.depth.

    Diagnostic only: a lower estimate of the projective-norm majorant of
    ||Gamma_1^alpha||, since the Euclidean norm underestimates the
    projective one.
    """
    total = 1.0
    for k in range(1, sig.depth + 1):
        total += alpha**k * float(np.linalg.norm(sig.level(k)))
    return total


def geometry_or_raise(path: PiecewiseLinearPath) -> SegmentGeometry:
    geom = segment_geometry(path)
    require_clean_angles(geom)
    return geom
