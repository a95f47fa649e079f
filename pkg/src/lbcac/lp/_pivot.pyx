# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled simplex iteration loop.

Operates in place on a dense tableau whose last row holds reduced costs
(entering candidates are positive) and whose last column holds the
right-hand side. Must make exactly the same choices as ``_pivot_py``.
"""

import numpy as np
cimport numpy as cnp

cnp.import_array()


def run_pivots(double[:, ::1] T, long long[::1] basis, Py_ssize_t ncols,
               Py_ssize_t max_iter, double opt_tol, double piv_tol, double tie_tol):
    cdef Py_ssize_t m = T.shape[0] - 1
    cdef Py_ssize_t width = T.shape[1]
    cdef Py_ssize_t rhs = width - 1
    cdef Py_ssize_t it, i, j, k, q, r, nnz
    cdef double best, ratio, limit, piv, f
    cdef long long best_basic
    cdef cnp.ndarray[cnp.intp_t, ndim=1] nz_arr = np.empty(width, dtype=np.intp)
    cdef cnp.intp_t[::1] nz = nz_arr

    for it in range(max_iter):
        q = -1
        for j in range(ncols):
            if T[m, j] > opt_tol:
                q = j
                break
        if q < 0:
            return 0, it

        best = 0.0
        r = -1
        for i in range(m):
            if T[i, q] > piv_tol:
                ratio = T[i, rhs] / T[i, q]
                if r < 0 or ratio < best:
                    best = ratio
                    r = i
        if r < 0:
            return 1, it
        limit = best + tie_tol * (1.0 + (best if best >= 0 else -best))
        best_basic = -1
        for i in range(m):
            if T[i, q] > piv_tol:
                ratio = T[i, rhs] / T[i, q]
                if ratio <= limit and (best_basic < 0 or basis[i] < best_basic):
                    best_basic = basis[i]
                    r = i

        piv = T[r, q]
        nnz = 0
        for j in range(width):
            T[r, j] = T[r, j] / piv
            if T[r, j] != 0.0:
                nz[nnz] = j
                nnz += 1
        for i in range(m + 1):
            if i == r:
                continue
            f = T[i, q]
            if f != 0.0:
                for k in range(nnz):
                    j = nz[k]
                    T[i, j] = T[i, j] - f * T[r, j]
                T[i, q] = 0.0
        T[r, q] = 1.0
        basis[r] = q
    return 2, max_iter
