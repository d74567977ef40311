"""Numpy fallback implementations of the hot path kernels.

Every function here mirrors its Cython twin in ``_native.pyx`` operation by
operation: the same elementwise expressions in the same association order,
with running sums accumulated sequentially (``np.cumsum``).  The two backends
therefore produce bit-identical output, which ``tests/test_kernels.py``
asserts.

All inputs are C-contiguous float64 2-D arrays of shape (n_rows, n_nodes);
the dispatch layer in ``__init__`` takes care of coercion.
"""

import numpy as np

name = "pure"


def exp_weighted_integral(values, weights, a, dt):
    """Row-wise J = w*B + a * cumtrapz(w*B, dt) for w[k] the node weights."""
    g = values * weights
    out = np.empty_like(g)
    out[:, 0] = g[:, 0]
    if g.shape[1] > 1:
        mid = (0.5 * (g[:, :-1] + g[:, 1:])) * dt
        out[:, 1:] = g[:, 1:] + a * np.cumsum(mid, axis=1)
    return out


def cumtrapz(values, dt):
    """Row-wise cumulative trapezoid sums on a uniform grid; column 0 is 0."""
    out = np.empty_like(values)
    out[:, 0] = 0.0
    if values.shape[1] > 1:
        mid = (0.5 * (values[:, :-1] + values[:, 1:])) * dt
        out[:, 1:] = np.cumsum(mid, axis=1)
    return out


def midpoint_cumsum(f, g):
    """Row-wise cumulative sums of 0.5*(f_k + f_{k-1}) * (g_k - g_{k-1})."""
    out = np.empty_like(f)
    out[:, 0] = 0.0
    if f.shape[1] > 1:
        terms = (0.5 * (f[:, 1:] + f[:, :-1])) * (g[:, 1:] - g[:, :-1])
        out[:, 1:] = np.cumsum(terms, axis=1)
    return out


def left_cumsum(f, g):
    """Row-wise cumulative sums of f_{k-1} * (g_k - g_{k-1})."""
    out = np.empty_like(f)
    out[:, 0] = 0.0
    if f.shape[1] > 1:
        terms = f[:, :-1] * (g[:, 1:] - g[:, :-1])
        out[:, 1:] = np.cumsum(terms, axis=1)
    return out


def first_nonpositive(values):
    """Per row: smallest index k >= 1 with values[k] <= 0, else -1."""
    if values.shape[1] <= 1:
        return np.full(values.shape[0], -1, dtype=np.int64)
    tail = values[:, 1:] <= 0.0
    hit = tail.any(axis=1)
    idx = tail.argmax(axis=1).astype(np.int64) + 1
    return np.where(hit, idx, np.int64(-1))


def row_extrema(values):
    """Per-row (min, max) over all nodes."""
    return values.min(axis=1), values.max(axis=1)
