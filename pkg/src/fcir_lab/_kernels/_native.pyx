# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled twins of the kernels in ``pure.py``.

The loops are written to reproduce the numpy fallback bit for bit: identical
elementwise expressions, identical association order, sequential running
sums.  Keep the two files in sync when changing either.
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()

name = "compiled"


def exp_weighted_integral(double[:, ::1] values, double[::1] weights,
                          double a, double dt):
    cdef Py_ssize_t n_rows = values.shape[0]
    cdef Py_ssize_t n = values.shape[1]
    out_arr = np.empty((n_rows, n), dtype=np.float64)
    cdef double[:, ::1] out = out_arr
    cdef Py_ssize_t r, k
    cdef double acc, gp, gc
    with nogil:
        for r in range(n_rows):
            gp = values[r, 0] * weights[0]
            out[r, 0] = gp
            acc = 0.0
            for k in range(1, n):
                gc = values[r, k] * weights[k]
                acc = acc + (0.5 * (gp + gc)) * dt
                out[r, k] = gc + a * acc
                gp = gc
    return out_arr


def cumtrapz(double[:, ::1] values, double dt):
    cdef Py_ssize_t n_rows = values.shape[0]
    cdef Py_ssize_t n = values.shape[1]
    out_arr = np.empty((n_rows, n), dtype=np.float64)
    cdef double[:, ::1] out = out_arr
    cdef Py_ssize_t r, k
    cdef double acc
    with nogil:
        for r in range(n_rows):
            out[r, 0] = 0.0
            acc = 0.0
            for k in range(1, n):
                acc = acc + (0.5 * (values[r, k - 1] + values[r, k])) * dt
                out[r, k] = acc
    return out_arr


def midpoint_cumsum(double[:, ::1] f, double[:, ::1] g):
    cdef Py_ssize_t n_rows = f.shape[0]
    cdef Py_ssize_t n = f.shape[1]
    out_arr = np.empty((n_rows, n), dtype=np.float64)
    cdef double[:, ::1] out = out_arr
    cdef Py_ssize_t r, k
    cdef double acc
    with nogil:
        for r in range(n_rows):
            out[r, 0] = 0.0
            acc = 0.0
            for k in range(1, n):
                acc = acc + (0.5 * (f[r, k] + f[r, k - 1])) * (g[r, k] - g[r, k - 1])
                out[r, k] = acc
    return out_arr


def left_cumsum(double[:, ::1] f, double[:, ::1] g):
    cdef Py_ssize_t n_rows = f.shape[0]
    cdef Py_ssize_t n = f.shape[1]
    out_arr = np.empty((n_rows, n), dtype=np.float64)
    cdef double[:, ::1] out = out_arr
    cdef Py_ssize_t r, k
    cdef double acc
    with nogil:
        for r in range(n_rows):
            out[r, 0] = 0.0
            acc = 0.0
            for k in range(1, n):
                acc = acc + f[r, k - 1] * (g[r, k] - g[r, k - 1])
                out[r, k] = acc
    return out_arr


def first_nonpositive(double[:, ::1] values):
    cdef Py_ssize_t n_rows = values.shape[0]
    cdef Py_ssize_t n = values.shape[1]
    out_arr = np.empty(n_rows, dtype=np.int64)
    cdef long long[::1] out = out_arr
    cdef Py_ssize_t r, k
    cdef long long found
    with nogil:
        for r in range(n_rows):
            found = -1
            for k in range(1, n):
                if values[r, k] <= 0.0:
                    found = k
                    break
            out[r] = found
    return out_arr


def row_extrema(double[:, ::1] values):
    cdef Py_ssize_t n_rows = values.shape[0]
    cdef Py_ssize_t n = values.shape[1]
    lo_arr = np.empty(n_rows, dtype=np.float64)
    hi_arr = np.empty(n_rows, dtype=np.float64)
    cdef double[::1] lo = lo_arr
    cdef double[::1] hi = hi_arr
    cdef Py_ssize_t r, k
    cdef double mn, mx, v
    with nogil:
        for r in range(n_rows):
            mn = values[r, 0]
            mx = values[r, 0]
            for k in range(1, n):
                v = values[r, k]
                if v < mn:
                    mn = v
                if v > mx:
                    mx = v
            lo[r] = mn
            hi[r] = mx
    return lo_arr, hi_arr
