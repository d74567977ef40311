"""Hot numeric kernels with a compiled fast path.

A Cython extension (``_native``) carries the per-path inner loops; when it is
not built, a numpy implementation with identical semantics (``pure``) takes
over.  Selection happens once at import time and can be forced through the
environment variable ``FCIR_KERNELS`` (``compiled`` or ``pure``).

The public functions below accept 1-D or 2-D float64 arrays; 1-D input yields
1-D output.  All kernels release the GIL in the compiled backend, so path
chunks can be processed by a thread pool.
"""

import os

import numpy as np

from . import pure

try:
    from . import _native
except ImportError:
    _native = None

_requested = os.environ.get("FCIR_KERNELS", "").strip().lower()
if _requested == "compiled" and _native is None:
    raise ImportError(
        "FCIR_KERNELS=compiled but the fcir_lab._kernels._native extension "
        "is not built; reinstall with a C compiler available"
    )
if _requested == "pure" or _native is None:
    _impl = pure
else:
    _impl = _native

#: Name of the active backend: "compiled" or "pure".
BACKEND = _impl.name


def _as_rows(x):
    arr = np.ascontiguousarray(x, dtype=np.float64)
    if arr.ndim == 1:
        return arr.reshape(1, -1), True
    if arr.ndim != 2:
        raise ValueError(f"expected a 1-D or 2-D array, got ndim={arr.ndim}")
    return arr, False


def _as_vector(x, length):
    arr = np.ascontiguousarray(x, dtype=np.float64)
    if arr.ndim != 1 or arr.shape[0] != length:
        raise ValueError("weight vector must be 1-D and match the node count")
    return arr


def exp_weighted_integral(values, weights, a, dt):
    """Rows of w*B + a * cumtrapz(w*B, dt); node 0 gives w[0]*B[0]."""
    rows, squeeze = _as_rows(values)
    w = _as_vector(weights, rows.shape[1])
    out = _impl.exp_weighted_integral(rows, w, float(a), float(dt))
    return out[0] if squeeze else out


def cumtrapz(values, dt):
    """Cumulative trapezoid sums on a uniform grid; node 0 gives 0."""
    rows, squeeze = _as_rows(values)
    out = _impl.cumtrapz(rows, float(dt))
    return out[0] if squeeze else out


def midpoint_cumsum(f, g):
    """Cumulative midpoint-average sums sum 0.5*(f_k+f_{k-1})*(g_k-g_{k-1})."""
    fr, squeeze = _as_rows(f)
    gr, _ = _as_rows(g)
    if fr.shape != gr.shape:
        raise ValueError("f and g must have the same shape")
    out = _impl.midpoint_cumsum(fr, gr)
    return out[0] if squeeze else out


def left_cumsum(f, g):
    """Cumulative left-point sums sum f_{k-1}*(g_k-g_{k-1})."""
    fr, squeeze = _as_rows(f)
    gr, _ = _as_rows(g)
    if fr.shape != gr.shape:
        raise ValueError("f and g must have the same shape")
    out = _impl.left_cumsum(fr, gr)
    return out[0] if squeeze else out


def first_nonpositive(values):
    """Per row, the smallest index k >= 1 with values[k] <= 0, else -1."""
    rows, squeeze = _as_rows(values)
    out = _impl.first_nonpositive(rows)
    return int(out[0]) if squeeze else out


def row_extrema(values):
    """Per-row (min, max) over all nodes."""
    rows, squeeze = _as_rows(values)
    lo, hi = _impl.row_extrema(rows)
    return (float(lo[0]), float(hi[0])) if squeeze else (lo, hi)
