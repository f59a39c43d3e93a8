# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled backend for the hot kernels.

Scalar twin of ``_solve_py``: identical bracketing and bisection
decisions, executed point by point in C. See that module for the
contract documentation.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport pow, INFINITY

cnp.import_array()

BACKEND_NAME = "compiled"


cdef inline double _gval(const double[::1] alphas, const double[::1] powers,
                         const double[:, ::1] vals, Py_ssize_t i,
                         double lam, Py_ssize_t m) noexcept nogil:
    cdef double acc = 0.0
    cdef Py_ssize_t j
    for j in range(m):
        acc += alphas[j] * pow(vals[j, i] / lam, powers[j])
    return acc


def solve_separable(alphas, powers, vals, double tau0_val, bint is_psi,
                    int max_iter=200):
    cdef const double[::1] a = np.ascontiguousarray(alphas, dtype=np.float64)
    cdef const double[::1] p = np.ascontiguousarray(powers, dtype=np.float64)
    cdef const double[:, ::1] v = np.ascontiguousarray(vals, dtype=np.float64)
    cdef Py_ssize_t m = v.shape[0], n = v.shape[1]
    out = np.zeros(n)
    cdef double[::1] lam = out
    cdef bint all_linear = True
    cdef Py_ssize_t i, j
    cdef int it
    cdef double s, acc, hi, lo, mid, gm

    for j in range(m):
        if p[j] != 1.0:
            all_linear = False
            break

    with nogil:
        for i in range(n):
            s = 0.0
            for j in range(m):
                s += v[j, i]
            if not is_psi and s == 0.0:
                lam[i] = 0.0
                continue
            if all_linear:
                acc = 0.0
                for j in range(m):
                    acc += a[j] * v[j, i]
                lam[i] = acc
                continue
            hi = s / tau0_val
            lo = hi
            for it in range(max_iter):
                lo *= 0.5
                gm = _gval(a, p, v, i, lo, m)
                if not is_psi:
                    if gm >= 1.0:
                        break
                else:
                    if gm <= 1.0:
                        break
            # the walk flips inside a factor-2 window: root in [lo, 2*lo]
            hi = 2.0 * lo
            for it in range(max_iter):
                mid = 0.5 * (lo + hi)
                if mid <= lo or mid >= hi:
                    break
                gm = _gval(a, p, v, i, mid, m)
                if (gm >= 1.0) if not is_psi else (gm <= 1.0):
                    lo = mid
                else:
                    hi = mid
            lam[i] = 0.5 * (lo + hi)
    return out


def legendre_envelope(xs, psi, ys, block=2048):
    cdef const double[:, ::1] x = np.ascontiguousarray(xs, dtype=np.float64)
    cdef const double[::1] f = np.ascontiguousarray(psi, dtype=np.float64)
    cdef const double[:, ::1] y = np.ascontiguousarray(ys, dtype=np.float64)
    cdef Py_ssize_t n = x.shape[0], d = x.shape[1], mrows = y.shape[0]
    vals_arr = np.empty(mrows)
    idx_arr = np.empty(mrows, dtype=np.int64)
    cdef double[::1] vals = vals_arr
    cdef cnp.int64_t[::1] idx = idx_arr
    cdef Py_ssize_t i, j, k, best_j
    cdef double best, score

    with nogil:
        for i in range(mrows):
            best = -INFINITY
            best_j = 0
            for j in range(n):
                score = 0.0
                for k in range(d):
                    score += y[i, k] * x[j, k]
                score -= f[j]
                if score > best:
                    best = score
                    best_j = j
            vals[i] = best
            idx[i] = best_j
    return vals_arr, idx_arr
