# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot loops: batched 3x3 Jacobi and regulated mode sums."""

import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt, fabs, exp

cnp.import_array()

DEF PAIRWISE_BLOCK = 128
DEF MAX_SWEEPS = 50


cdef void _jacobi3(double a[3][3], double v[3][3], double rel_tol) noexcept nogil:
    cdef int i, j, k, p, q, sweep
    cdef double norm2 = 0.0, off2, theta, t, c, s, apk, aqk, vkp, vkq, app, aqq, apq
    for i in range(3):
        for j in range(3):
            norm2 += a[i][j] * a[i][j]
            v[i][j] = 1.0 if i == j else 0.0
    for sweep in range(MAX_SWEEPS):
        off2 = 2.0 * (a[0][1] * a[0][1] + a[0][2] * a[0][2] + a[1][2] * a[1][2])
        if off2 <= rel_tol * rel_tol * norm2 or off2 == 0.0:
            return
        for p in range(2):
            for q in range(p + 1, 3):
                apq = a[p][q]
                if apq == 0.0:
                    continue
                app = a[p][p]
                aqq = a[q][q]
                theta = (aqq - app) / (2.0 * apq)
                if theta >= 0.0:
                    t = 1.0 / (theta + sqrt(theta * theta + 1.0))
                else:
                    t = -1.0 / (-theta + sqrt(theta * theta + 1.0))
                c = 1.0 / sqrt(t * t + 1.0)
                s = t * c
                for k in range(3):
                    apk = a[p][k]
                    aqk = a[q][k]
                    a[p][k] = c * apk - s * aqk
                    a[q][k] = s * apk + c * aqk
                for k in range(3):
                    apk = a[k][p]
                    aqk = a[k][q]
                    a[k][p] = c * apk - s * aqk
                    a[k][q] = s * apk + c * aqk
                a[p][q] = 0.0
                a[q][p] = 0.0
                for k in range(3):
                    vkp = v[k][p]
                    vkq = v[k][q]
                    v[k][p] = c * vkp - s * vkq
                    v[k][q] = s * vkp + c * vkq


def jacobi_eigh3(double[:, :, ::1] blocks, double rel_tol=1e-14):
    """Unsorted eigenpairs of a stack of symmetric 3x3 blocks.

    Returns ``(w, v)`` with ``w[n, k]`` the eigenvalues and ``v[n, :, k]``
    the matching unit eigenvectors.
    """
    cdef Py_ssize_t n = blocks.shape[0], m
    cdef int i, j
    cdef double a[3][3]
    cdef double v[3][3]
    w_out = np.empty((n, 3))
    v_out = np.empty((n, 3, 3))
    cdef double[:, ::1] wv = w_out
    cdef double[:, :, ::1] vv = v_out
    with nogil:
        for m in range(n):
            for i in range(3):
                for j in range(3):
                    a[i][j] = blocks[m, i, j]
            _jacobi3(a, v, rel_tol)
            for i in range(3):
                wv[m, i] = a[i][i]
                for j in range(3):
                    vv[m, i, j] = v[i][j]
    return w_out, v_out


cdef double _pairwise(const double[::1] eps, const double[::1] weight,
                      double s, Py_ssize_t lo, Py_ssize_t hi) noexcept nogil:
    cdef Py_ssize_t j, mid
    cdef double acc = 0.0
    cdef double buf[PAIRWISE_BLOCK]
    if hi - lo <= PAIRWISE_BLOCK:
        for j in range(hi - lo):
            buf[j] = exp(-eps[lo + j] * s)
        for j in range(hi - lo):
            acc += weight[lo + j] * eps[lo + j] * buf[j]
        return acc
    mid = lo + (hi - lo) // 2
    return _pairwise(eps, weight, s, lo, mid) + _pairwise(eps, weight, s, mid, hi)


def regulated_sums(const double[::1] eps, const double[::1] weight, const double[::1] cutoffs):
    """``out[k] = sum_j weight[j] * eps[j] * exp(-eps[j] * cutoffs[k])``, pairwise order."""
    cdef Py_ssize_t k, n = eps.shape[0], ns = cutoffs.shape[0]
    out = np.empty(ns)
    cdef double[::1] ov = out
    with nogil:
        for k in range(ns):
            ov[k] = _pairwise(eps, weight, cutoffs[k], 0, n) if n > 0 else 0.0
    return out
