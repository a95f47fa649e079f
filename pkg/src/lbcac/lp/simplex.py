"""Two-phase dense primal simplex with Bland's rule.

The hot pivot loop lives in a kernel (compiled or numpy, see ``_backend``).
This module builds the standard form, drives the two phases, periodically
refactors the tableau from the original data to shed round-off, and maps the
final basis back to the caller's variables.
"""

from __future__ import annotations

import math

import numpy as np

from ._backend import get_kernel
from .program import EQ, GE, LE, MAXIMIZE, LinearProgram, LpSolution, LpStatus, NumericalFailure

FEAS_TOL = 1e-9
OPT_TOL = 1e-9
PIV_TOL = 1e-9
TIE_TOL = 1e-12
REFACTOR_EVERY = 500


class _StandardForm:
    """``A x = b, x >= 0, b >= 0`` with a slack/artificial starting basis.

    Original variable ``src[k]`` receives ``sign[k] * x[k]`` on top of ``shift``.
    """

    def __init__(self, lp: LinearProgram):
        n = lp.num_vars
        shift = np.zeros(n)
        d_cols: list[tuple[int, float]] = []  # (original var, sign) per structural column
        bound_rows: list[tuple[int, float]] = []  # (structural column, limit)
        for j in range(n):
            lo, hi = lp.lower[j], lp.upper[j]
            if lo > -math.inf:
                shift[j] = lo
                d_cols.append((j, 1.0))
                if hi < math.inf:
                    bound_rows.append((len(d_cols) - 1, hi - lo))
            elif hi < math.inf:
                shift[j] = hi
                d_cols.append((j, -1.0))
            else:
                d_cols.append((j, 1.0))
                d_cols.append((j, -1.0))
        n_struct = len(d_cols)
        src = np.array([j for j, _ in d_cols], dtype=np.int64)
        sign = np.array([s for _, s in d_cols])

        m0 = lp.num_constraints
        A0 = np.zeros((m0, n))
        b0 = np.zeros(m0)
        rels = []
        for r, con in enumerate(lp.constraints):
            for j, a in con.coeffs.items():
                A0[r, j] = a
            b0[r] = con.rhs
            rels.append(con.rel)
        A = A0[:, src] * sign
        b = b0 - A0 @ shift
        if bound_rows:
            extra = np.zeros((len(bound_rows), n_struct))
            for r, (col, limit) in enumerate(bound_rows):
                extra[r, col] = 1.0
            A = np.vstack([A, extra])
            b = np.concatenate([b, [lim for _, lim in bound_rows]])
            rels += [LE] * len(bound_rows)

        flip = {LE: GE, GE: LE, EQ: EQ}
        for r in range(len(b)):
            if b[r] < 0 or (b[r] == 0 and rels[r] == GE):
                A[r] = -A[r]
                b[r] = -b[r]
                rels[r] = flip[rels[r]]

        m = len(b)
        n_slack = sum(1 for rel in rels if rel != EQ)
        n_art = sum(1 for rel in rels if rel != LE)
        N = n_struct + n_slack + n_art
        full = np.zeros((m, N))
        full[:, :n_struct] = A
        basis = np.empty(m, dtype=np.int64)
        s = n_struct
        a = n_struct + n_slack
        for r, rel in enumerate(rels):
            if rel == LE:
                full[r, s] = 1.0
                basis[r] = s
                s += 1
            elif rel == GE:
                full[r, s] = -1.0
                s += 1
                full[r, a] = 1.0
                basis[r] = a
                a += 1
            else:
                full[r, a] = 1.0
                basis[r] = a
                a += 1

        c = lp.objective_vector()
        if lp.sense != MAXIMIZE:
            c = -c
        self.c = np.zeros(N)
        self.c[:n_struct] = c[src] * sign
        self.shift, self.src, self.sign = shift, src, sign
        self.A, self.b, self.basis = full, b, basis
        self.n_struct, self.art_start, self.N = n_struct, n_struct + n_slack, N
        self.scale = max(1.0, float(np.max(np.abs(b), initial=0.0)))


class _Driver:
    def __init__(self, sf: _StandardForm, kernel, cap: int):
        self.sf = sf
        self.kernel = kernel
        self.cap = cap
        self.iterations = 0
        self.A = sf.A.copy()
        self.b = sf.b.copy()
        self.basis = sf.basis.copy()
        m, N = self.A.shape
        self.T = np.zeros((m + 1, N + 1))
        self.T[:m, :N] = self.A
        self.T[:m, N] = self.b

    def set_costs(self, c: np.ndarray) -> None:
        self.c = c
        self._price()

    def _price(self) -> None:
        m, N = self.A.shape
        T = self.T
        cb = self.c[self.basis]
        T[m, :N] = self.c - cb @ T[:m, :N]
        T[m, self.basis] = 0.0
        T[m, N] = -(cb @ T[:m, N])

    def refactor(self) -> None:
        """Rebuild the tableau as ``B^-1 [A | b]`` for the current basis."""
        m, N = self.A.shape
        T = self.T
        if m:
            B = self.A[:, self.basis]
            try:
                X = np.linalg.solve(B, np.column_stack([self.A, self.b]))
            except np.linalg.LinAlgError as exc:
                raise NumericalFailure("singular basis during refactorization") from exc
            X[:, self.basis] = np.eye(m)
            rhs = X[:, N]
            if np.any(rhs < -1e-7 * self.sf.scale):
                raise NumericalFailure("basis lost primal feasibility")
            np.maximum(rhs, 0.0, out=rhs)
            T[:m] = X
        self._price()

    def certify(self, ncols: int) -> bool:
        """Check the current basis against the original data.

        On success the right-hand side is replaced by the accurately solved
        basic values; on failure the caller should refactor and keep going.
        """
        m, N = self.A.shape
        if m:
            B = self.A[:, self.basis]
            try:
                xb = np.linalg.solve(B, self.b)
                y = np.linalg.solve(B.T, self.c[self.basis])
            except np.linalg.LinAlgError:
                return False
            if np.any(xb < -FEAS_TOL * self.sf.scale):
                return False
            d = self.c[:ncols] - y @ self.A[:, :ncols]
        else:
            xb = np.zeros(0)
            d = self.c[:ncols]
        d[self.basis[self.basis < ncols]] = 0.0
        if np.any(d > OPT_TOL):
            return False
        xb = np.maximum(xb, 0.0)
        self.T[:m, N] = xb
        self.T[m, N] = -(self.c[self.basis] @ xb)
        return True

    def run(self, ncols: int) -> int:
        """Iterate to optimality over columns ``< ncols``; return kernel status."""
        fresh = False
        while True:
            budget = min(REFACTOR_EVERY, self.cap - self.iterations)
            if budget <= 0:
                raise NumericalFailure(f"iteration cap {self.cap} reached")
            status, k = self.kernel(self.T, self.basis, ncols, budget, OPT_TOL, PIV_TOL, TIE_TOL)
            self.iterations += int(k)
            if status == 0 and self.certify(ncols):
                return 0
            if status == 1 and fresh and k == 0:
                return 1
            self.refactor()
            fresh = True

    def objective(self) -> float:
        return -float(self.T[-1, -1])

    def pivot(self, r: int, q: int) -> None:
        T = self.T
        T[r] = T[r] / T[r, q]
        f = T[:, q].copy()
        f[r] = 0.0
        rows = np.flatnonzero(f)
        T[rows] -= np.outer(f[rows], T[r])
        T[rows, q] = 0.0
        T[r, q] = 1.0
        self.basis[r] = q

    def drop_rows(self, rows: list[int]) -> None:
        keep = np.setdiff1d(np.arange(self.A.shape[0]), rows)
        self.A = self.A[keep]
        self.b = self.b[keep]
        self.basis = self.basis[keep].copy()
        self.T = np.vstack([self.T[keep], self.T[-1:]])

    def drop_columns_from(self, start: int) -> None:
        self.A = np.ascontiguousarray(self.A[:, :start])
        self.T = np.ascontiguousarray(np.column_stack([self.T[:, :start], self.T[:, -1]]))
        self.c = self.c[:start]

    def basic_solution(self) -> np.ndarray:
        x = np.zeros(self.A.shape[1])
        x[self.basis] = self.T[:-1, -1]
        return x


def solve(lp: LinearProgram, backend: str | None = None) -> LpSolution:
    """Solve ``lp`` to optimality.

    Deterministic: Bland's lowest-index entering rule with lowest-basic-index
    tie-breaking in the ratio test. Raises :class:`NumericalFailure` when the
    iteration cap of ``50 * (num_vars + num_constraints)`` is exhausted.
    """
    kernel = get_kernel(backend)
    sf = _StandardForm(lp)
    cap = 50 * max(1, lp.num_vars + lp.num_constraints)
    drv = _Driver(sf, kernel, cap)

    if sf.art_start < sf.N:
        phase1 = np.zeros(sf.N)
        phase1[sf.art_start:] = -1.0
        drv.set_costs(phase1)
        drv.run(sf.N)
        if -drv.objective() > FEAS_TOL * sf.scale:
            return LpSolution(LpStatus.INFEASIBLE, np.full(lp.num_vars, np.nan), math.nan, drv.iterations)
        redundant = []
        for r in range(len(drv.basis)):
            if drv.basis[r] < sf.art_start:
                continue
            row = drv.T[r, : sf.art_start]
            nz = np.flatnonzero(np.abs(row) > PIV_TOL)
            if nz.size:
                drv.pivot(r, int(nz[0]))
            else:
                redundant.append(r)
        if redundant:
            drv.drop_rows(redundant)
        drv.drop_columns_from(sf.art_start)
        drv.set_costs(sf.c[: sf.art_start])
    else:
        drv.set_costs(sf.c)

    status = drv.run(sf.art_start)
    x_std = drv.basic_solution()[: sf.n_struct]
    x = sf.shift.copy()
    np.add.at(x, sf.src, sf.sign * x_std)
    if status == 1:
        obj = math.inf if lp.sense == MAXIMIZE else -math.inf
        return LpSolution(LpStatus.UNBOUNDED, x, obj, drv.iterations)

    worst = lp.max_violation(x)
    if worst > FEAS_TOL * sf.scale:
        raise NumericalFailure(f"optimal basis violates constraints by {worst:.3g}")
    return LpSolution(LpStatus.OPTIMAL, x, lp.evaluate(x), drv.iterations)
