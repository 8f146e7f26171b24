"""Hot numeric kernels: numba-compiled loops with a pure-numpy fallback.

The active backend is chosen at import time from the environment variable
``SIGINVERT_BACKEND`` ("numba" or "numpy", default "numba" when numba is
importable) and can be switched programmatically with :func:`set_backend`,
which the backend benchmark and the tests use to compare both paths.

All kernels operate on flat, row-major float64 arrays:

* ``outer_accum(out, a, b)``    -- out += a (x) b, flattened outer product.
* ``insert_slot(sig, y, d, pre, post)``  -- broadcast-insert the vector y
  into slot p of a degree-n tensor, where pre = d**(p-1) and
  post = d**(n+1-p); returns the degree-(n+1) coefficients.
* ``adjoint_slot(sig, z, d, pre, post)`` -- the transpose of insert_slot
  applied to z, returning a length-d vector, without ever materializing
  the (d**(n+1) x d) matrix of the insertion map.
"""

from __future__ import annotations

import os

import numpy as np

_env = os.environ.get("SIGINVERT_BACKEND", "").strip().lower()

_HAVE_NUMBA = False
if _env != "numpy":
    try:
        from numba import njit

        _HAVE_NUMBA = True
    except ImportError:
        if _env == "numba":
            raise


# -- pure numpy implementations -----------------------------------------


def _outer_accum_np(out, a, b):
    out.reshape(a.size, b.size)[...] += a[:, None] * b[None, :]


def _insert_slot_np(sig, y, d, pre, post):
    out = sig.reshape(pre, 1, post) * y.reshape(1, d, 1)
    return np.ascontiguousarray(out).reshape(pre * d * post)


def _adjoint_slot_np(sig, z, d, pre, post):
    return np.einsum("ajb,ab->j", z.reshape(pre, d, post), sig.reshape(pre, post))


# -- numba implementations -----------------------------------------------

if _HAVE_NUMBA:

    @njit(cache=True)
    def _outer_accum_nb(out, a, b):
        nb = b.size
        for i in range(a.size):
            ai = a[i]
            base = i * nb
            for j in range(nb):
                out[base + j] += ai * b[j]

    @njit(cache=True)
    def _insert_slot_nb(sig, y, d, pre, post):
        out = np.empty(pre * d * post)
        idx = 0
        for a in range(pre):
            base = a * post
            for j in range(d):
                yj = y[j]
                for b in range(post):
                    out[idx] = yj * sig[base + b]
                    idx += 1
        return out

    @njit(cache=True)
    def _adjoint_slot_nb(sig, z, d, pre, post):
        out = np.zeros(d)
        idx = 0
        for a in range(pre):
            base = a * post
            for j in range(d):
                acc = 0.0
                for b in range(post):
                    acc += sig[base + b] * z[idx]
                    idx += 1
                out[j] += acc
        return out


_IMPLS = {"numpy": (_outer_accum_np, _insert_slot_np, _adjoint_slot_np)}
if _HAVE_NUMBA:
    _IMPLS["numba"] = (_outer_accum_nb, _insert_slot_nb, _adjoint_slot_nb)

_active = "numba" if _HAVE_NUMBA else "numpy"
if _env in _IMPLS:
    _active = _env


def active_backend() -> str:
    return _active


def available_backends() -> tuple[str, ...]:
    return tuple(sorted(_IMPLS))


def set_backend(name: str) -> None:
    """Switch the kernel implementation; raises ValueError on unknown name."""
    global _active
    if name not in _IMPLS:
        raise ValueError(
            f"unknown backend {name!r}; available: {available_backends()}"
        )
    _active = name


def outer_accum(out, a, b):
    _IMPLS[_active][0](out, a, b)


def insert_slot(sig, y, d, pre, post):
    return _IMPLS[_active][1](sig, y, d, pre, post)


def adjoint_slot(sig, z, d, pre, post):
    return _IMPLS[_active][2](sig, z, d, pre, post)
