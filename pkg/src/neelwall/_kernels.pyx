# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled twins of the hot kernels in ``_kernels_np``.

Same contracts, same summation order up to floating-point associativity;
the parity test in tests/test_kernels.py pins the agreement.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport atan2, log

cnp.import_array()


def pair_lag_sum(const double[::1] fm):
    cdef Py_ssize_t c = fm.shape[0]
    cdef Py_ssize_t lag, i
    cdef double total = 0.0, acc, d
    for lag in range(1, c):
        acc = 0.0
        for i in range(c - lag):
            d = fm[i] - fm[i + lag]
            acc += d * d
        total += acc / (<double> lag * <double> lag)
    return total


def poisson_layer(const double[::1] xs, const double[::1] f, const double[::1] targets, double y):
    cdef Py_ssize_t n = xs.shape[0]
    cdef Py_ssize_t nt = targets.shape[0]
    cdef double dx = xs[1] - xs[0]
    cdef double inv_pi = 1.0 / np.pi
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.empty(nt, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] slopes_arr = np.empty(n - 1, dtype=np.float64)
    cdef double[::1] slopes = slopes_arr
    cdef double[::1] out_v = out
    cdef Py_ssize_t i, j
    cdef double t, rel, rel_next, atn, atn_next, lg, lg_next, acc, a

    for i in range(n - 1):
        slopes[i] = (f[i + 1] - f[i]) / dx

    for j in range(nt):
        t = targets[j]
        rel = xs[0] - t
        atn = atan2(rel, y)
        lg = log(rel * rel + y * y)
        acc = 0.0
        for i in range(n - 1):
            rel_next = xs[i + 1] - t
            atn_next = atan2(rel_next, y)
            lg_next = log(rel_next * rel_next + y * y)
            a = f[i] - slopes[i] * rel
            acc += a * inv_pi * (atn_next - atn) \
                + slopes[i] * (y * inv_pi * 0.5) * (lg_next - lg)
            rel = rel_next
            atn = atn_next
            lg = lg_next
        out_v[j] = acc
    return out
