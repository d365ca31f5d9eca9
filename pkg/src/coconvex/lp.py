"""Dense two-phase primal simplex with Bland's rule.

Small problems only (a few thousand rows, a few dozen columns).  Variable
bounds are handled by substitution: finite lower bounds are shifted to zero,
finite upper bounds become extra rows, and free variables are split into a
difference of two nonnegative parts.

The tableau is updated by elementary pivots but rebuilt from the original
matrix and the current basis every ``REFACTOR_EVERY`` pivots and before
optimality is declared, so rounding drift cannot accumulate into an
infeasible answer.

The entering column is always the lowest-index improving one.  Ties in the
ratio test go to the largest pivot element, except after a long run of
degenerate pivots, where the smallest basic index is taken instead; that is
Bland's rule in full and rules out cycling.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import Infeasible, Unbounded

PIVOT_TOL = 1e-9
COST_TOL = 1e-10
FEAS_TOL = 1e-8
UNBOUNDED_TOL = 1e-7
REFACTOR_EVERY = 50
MAX_PIVOTS = 100_000
STALL_LIMIT = 50  # degenerate pivots before falling back to pure Bland


@dataclass(frozen=True)
class LPResult:
    x: np.ndarray
    fun: float
    pivots: int


class _Tableau:
    def __init__(self, A: np.ndarray, b: np.ndarray, basis: list[int]):
        self.A, self.b = A, b
        self.basis = list(basis)
        self.pivots = 0
        self.cost = np.zeros(A.shape[1])
        self.refactor()

    def refactor(self):
        B = self.A[:, self.basis]
        body = np.linalg.solve(B, np.column_stack([self.A, self.b]))
        body[:, -1] = np.maximum(body[:, -1], 0.0)
        self.T = body
        cb = self.cost[self.basis]
        self.d = self.cost - cb @ body[:, :-1]
        self.since = 0

    def set_cost(self, cost: np.ndarray):
        self.cost = cost
        self.refactor()

    def pivot(self, row: int, col: int):
        T = self.T
        T[row] /= T[row, col]
        colv = T[:, col].copy()
        colv[row] = 0.0
        T -= np.outer(colv, T[row])
        T[:, -1] = np.maximum(T[:, -1], 0.0)
        self.d = self.d - self.d[col] * T[row, :-1]
        self.basis[row] = col
        self.pivots += 1
        self.since += 1
        if self.pivots > MAX_PIVOTS:
            raise RuntimeError("simplex pivot limit exceeded")
        if self.since >= REFACTOR_EVERY:
            self.refactor()

    def run(self, allowed: int):
        """Minimise the current cost over columns ``< allowed`` (Bland's rule)."""
        fresh = False
        stall = 0
        skip = np.zeros(allowed, dtype=bool)
        while True:
            entering = np.nonzero((self.d[:allowed] < -COST_TOL) & ~skip)[0]
            if entering.size == 0:
                if fresh:
                    return
                self.refactor()
                fresh = True
                skip[:] = False
                continue
            fresh = False
            col = int(entering[0])
            colv = self.T[:, col]
            scale = max(1.0, float(np.abs(colv).max()))
            rows = np.nonzero(colv > PIVOT_TOL * scale)[0]
            if rows.size == 0:
                # a numerically empty column with a noise-level reduced cost is
                # not a ray; set it aside until the basis changes
                if self.d[col] > -UNBOUNDED_TOL * max(1.0, float(np.abs(self.cost).max())):
                    skip[col] = True
                    continue
                raise Unbounded("objective is unbounded below")
            ratios = self.T[rows, -1] / colv[rows]
            best = ratios.min()
            ties = rows[ratios <= best + 1e-12 * max(1.0, abs(best))]
            if stall < STALL_LIMIT:
                # largest pivot among the ties keeps the basis well conditioned
                row = int(ties[np.argmax(colv[ties])])
            else:
                row = int(min(ties, key=lambda r: self.basis[r]))
            stall = stall + 1 if best <= 0.0 else 0
            self.pivot(row, col)
            skip[:] = False

    def values(self) -> np.ndarray:
        z = np.zeros(self.A.shape[1])
        z[self.basis] = self.T[:, -1]
        return z


def lp_minimax_solve(costs: Sequence[float],
                     A_ub: Optional[np.ndarray] = None, b_ub: Optional[Sequence[float]] = None,
                     A_eq: Optional[np.ndarray] = None, b_eq: Optional[Sequence[float]] = None,
                     bounds: Optional[Sequence[tuple[Optional[float], Optional[float]]]] = None
                     ) -> LPResult:
    """Minimise ``costs @ x`` subject to ``A_ub x <= b_ub``, ``A_eq x = b_eq``.

    ``bounds`` defaults to ``(0, None)`` for every variable; ``None`` means
    unbounded on that side.  Raises :class:`Infeasible` or :class:`Unbounded`.
    """
    c = np.asarray(costs, dtype=float)
    n = c.size
    A_ub = np.zeros((0, n)) if A_ub is None else np.atleast_2d(np.asarray(A_ub, dtype=float))
    b_ub = np.zeros(0) if b_ub is None else np.asarray(b_ub, dtype=float)
    A_eq = np.zeros((0, n)) if A_eq is None else np.atleast_2d(np.asarray(A_eq, dtype=float))
    b_eq = np.zeros(0) if b_eq is None else np.asarray(b_eq, dtype=float)
    bounds = [(0.0, None)] * n if bounds is None else list(bounds)

    # x = shift + M @ z with z >= 0
    cols, shift = [], np.zeros(n)
    extra_rows, extra_rhs = [], []
    for j, (lo, hi) in enumerate(bounds):
        e = np.zeros(n)
        e[j] = 1.0
        if lo is not None:
            shift[j] = lo
            cols.append(e)
            if hi is not None:
                extra_rows.append(len(cols) - 1)
                extra_rhs.append(hi - lo)
        elif hi is not None:
            shift[j] = hi
            cols.append(-e)
        else:
            cols.append(e)
            cols.append(-e)
    M = np.array(cols).T
    nz = M.shape[1]

    G = A_ub @ M
    h = b_ub - A_ub @ shift
    if extra_rows:
        U = np.zeros((len(extra_rows), nz))
        U[np.arange(len(extra_rows)), extra_rows] = 1.0
        G = np.vstack([G, U])
        h = np.concatenate([h, extra_rhs])
    E = A_eq @ M
    g = b_eq - A_eq @ shift

    m_ub, m_eq = G.shape[0], E.shape[0]
    m = m_ub + m_eq
    n_cols = nz + m_ub  # structural + slack

    A = np.zeros((m, n_cols))
    b = np.concatenate([h, g])
    A[:m_ub, :nz] = G
    A[:m_ub, nz:] = np.eye(m_ub)
    A[m_ub:, :nz] = E
    neg = b < 0
    A[neg] *= -1.0
    b[neg] *= -1.0

    basis = []
    need_art = []
    for i in range(m):
        if i < m_ub and not neg[i]:
            basis.append(nz + i)
        else:
            basis.append(n_cols + len(need_art))
            need_art.append(i)
    n_art = len(need_art)
    A_full = np.hstack([A, np.zeros((m, n_art))])
    A_full[need_art, n_cols + np.arange(n_art)] = 1.0

    if m == 0:
        if np.any(c < 0):
            raise Unbounded("objective is unbounded below")
        return LPResult(x=shift.copy(), fun=float(c @ shift), pivots=0)

    tab = _Tableau(A_full, b, basis)
    if n_art:
        phase1 = np.zeros(n_cols + n_art)
        phase1[n_cols:] = 1.0
        tab.set_cost(phase1)
        tab.run(n_cols + n_art)
        if tab.values()[n_cols:].sum() > FEAS_TOL * max(1.0, float(np.abs(b).max())):
            raise Infeasible("constraints admit no feasible point")
        for i in range(m):
            if tab.basis[i] >= n_cols:
                nonart = np.nonzero(np.abs(tab.T[i, :n_cols]) > PIVOT_TOL)[0]
                if nonart.size:
                    tab.pivot(i, int(nonart[0]))

    phase2 = np.zeros(n_cols + n_art)
    phase2[:nz] = M.T @ c
    tab.set_cost(phase2)
    tab.run(n_cols)

    z = tab.values()
    x = shift + M @ z[:nz]
    return LPResult(x=x, fun=float(c @ x), pivots=tab.pivots)
