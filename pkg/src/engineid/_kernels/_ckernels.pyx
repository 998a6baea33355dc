# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled split-scan kernels; see engineid._kernels.pure for the contract.

The arithmetic mirrors the pure NumPy backend exactly: integer class counts
for Gini, a sequential running sum for SSE, and the same float64 expressions,
so both backends always pick the same split.
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()


def scan_split_gini(double[::1] x_sorted, cnp.int64_t[::1] y_sorted, int n_classes):
    cdef Py_ssize_t n = x_sorted.shape[0]
    if n < 2:
        return (-np.inf, np.nan)

    cdef cnp.int64_t[::1] left = np.zeros(n_classes, dtype=np.int64)
    cdef cnp.int64_t[::1] right = np.zeros(n_classes, dtype=np.int64)
    cdef Py_ssize_t i
    cdef cnp.int64_t c
    cdef cnp.int64_t s_left = 0
    cdef cnp.int64_t s_right = 0
    for i in range(n):
        c = y_sorted[i]
        s_right += 2 * right[c] + 1
        right[c] += 1

    cdef double best = -np.inf
    cdef double best_thr = np.nan
    cdef double proxy
    for i in range(n - 1):
        c = y_sorted[i]
        s_left += 2 * left[c] + 1
        left[c] += 1
        s_right -= 2 * right[c] - 1
        right[c] -= 1
        if x_sorted[i + 1] > x_sorted[i]:
            proxy = s_left / (<double> (i + 1)) + s_right / (<double> (n - i - 1))
            if proxy > best:
                best = proxy
                best_thr = (x_sorted[i] + x_sorted[i + 1]) / 2.0
    if best == -np.inf:
        return (-np.inf, np.nan)
    return (best, best_thr)


def scan_split_sse(double[::1] x_sorted, double[::1] r_sorted):
    cdef Py_ssize_t n = x_sorted.shape[0]
    if n < 2:
        return (-np.inf, np.nan)

    cdef double total = 0.0
    cdef Py_ssize_t i
    for i in range(n):
        total += r_sorted[i]

    cdef double best = -np.inf
    cdef double best_thr = np.nan
    cdef double s_left = 0.0
    cdef double s_right, proxy, n_left, n_right
    for i in range(n - 1):
        s_left += r_sorted[i]
        if x_sorted[i + 1] > x_sorted[i]:
            s_right = total - s_left
            n_left = <double> (i + 1)
            n_right = <double> (n - i - 1)
            proxy = s_left * s_left / n_left + s_right * s_right / n_right
            if proxy > best:
                best = proxy
                best_thr = (x_sorted[i] + x_sorted[i + 1]) / 2.0
    if best == -np.inf:
        return (-np.inf, np.nan)
    return (best, best_thr)
