"""Pure-numpy simplex iteration loop; mirrors the compiled ``_pivot`` kernel."""

import numpy as np


def run_pivots(T, basis, ncols, max_iter, opt_tol, piv_tol, tie_tol):
    m = T.shape[0] - 1
    for it in range(max_iter):
        candidates = np.flatnonzero(T[m, :ncols] > opt_tol)
        if candidates.size == 0:
            return 0, it
        q = candidates[0]

        col = T[:m, q]
        rows = np.flatnonzero(col > piv_tol)
        if rows.size == 0:
            return 1, it
        ratios = T[rows, -1] / col[rows]
        best = ratios[np.argmin(ratios)]
        limit = best + tie_tol * (1.0 + abs(best))
        tied = rows[ratios <= limit]
        r = tied[np.argmin(basis[tied])]

        T[r] = T[r] / T[r, q]
        f = T[:, q].copy()
        f[r] = 0.0
        touched = np.flatnonzero(f)
        if touched.size:
            T[touched] -= np.outer(f[touched], T[r])
            T[touched, q] = 0.0
        T[r, q] = 1.0
        basis[r] = q
    return 2, max_iter
