"""Dense two-phase primal simplex for ``min c.x, Ax = rhs, x >= 0``.

Dantzig pricing; Bland's rule takes over after a run of degenerate pivots.
The optimal basis and its inverse are returned so tableau rows can be read off.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import DimensionMismatch, InputError, NotOptimal, NumericalFailure, RowOutOfRange

log = logging.getLogger(__name__)

OPTIMAL = "Optimal"
INFEASIBLE = "Infeasible"
UNBOUNDED = "Unbounded"

PIVOT_TOL = 1e-9
COST_TOL = 1e-9
FEAS_TOL = 1e-7
DEGENERATE_RUN = 50
REINVERT_EVERY = 100


@dataclass(frozen=True, eq=False)
class StandardFormLp:
    A: np.ndarray
    rhs: np.ndarray
    cost: np.ndarray

    def __post_init__(self):
        A = np.atleast_2d(np.asarray(self.A, dtype=float))
        rhs = np.asarray(self.rhs, dtype=float).ravel()
        cost = np.asarray(self.cost, dtype=float).ravel()
        if A.shape != (rhs.size, cost.size):
            raise DimensionMismatch(f"A is {A.shape}, rhs {rhs.size}, cost {cost.size}")
        if not (np.isfinite(A).all() and np.isfinite(rhs).all() and np.isfinite(cost).all()):
            raise InputError("LP data contains NaN or Inf")
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "rhs", rhs)
        object.__setattr__(self, "cost", cost)

    @property
    def k(self) -> int:
        return self.A.shape[0]

    @property
    def d(self) -> int:
        return self.A.shape[1]


@dataclass(eq=False)
class LpOutcome:
    status: str
    objective: float = float("nan")
    x: Optional[np.ndarray] = None
    basis: list = field(default_factory=list)
    basis_inverse: Optional[np.ndarray] = None
    rows: Optional[np.ndarray] = None  # LP rows the basis refers to (redundant rows dropped)
    pivots: int = 0

    @property
    def optimal(self) -> bool:
        return self.status == OPTIMAL


class _Tableau:
    """Rows ``[B^-1 A | B^-1 rhs]`` plus a reduced-cost row."""

    def __init__(self, A, rhs, basis):
        self.A = A
        self.rhs = rhs
        self.basis = list(basis)
        self.T = np.empty((A.shape[0], A.shape[1] + 1))
        self.reinvert()

    def reinvert(self):
        B = self.A[:, self.basis]
        try:
            Binv = np.linalg.inv(B)
        except np.linalg.LinAlgError as exc:
            raise NumericalFailure("singular basis during reinversion") from exc
        self.T[:, :-1] = Binv @ self.A
        self.T[:, -1] = Binv @ self.rhs
        self.T[np.arange(len(self.basis)), self.basis] = 1.0

    def pivot(self, r, c):
        T = self.T
        piv = T[r, c]
        T[r] /= piv
        col = T[:, c].copy()
        col[r] = 0.0
        T -= np.outer(col, T[r])
        T[:, c] = 0.0
        T[r, c] = 1.0
        self.basis[r] = c


def _run(tab: _Tableau, cost, allowed, max_iter):
    """Primal simplex on ``tab`` for cost vector ``cost`` over ``allowed`` columns."""
    n = tab.A.shape[1]
    degenerate = 0
    bland = False
    pivots = 0
    banned = np.ones(n, dtype=bool)
    banned[allowed] = False
    while True:
        if pivots >= max_iter:
            raise NumericalFailure(f"iteration limit {max_iter} reached")
        T = tab.T
        cb = cost[tab.basis]
        rc = cost - cb @ T[:, :-1]
        rc[banned] = 0.0
        rc[tab.basis] = 0.0
        cand = np.flatnonzero(rc < -COST_TOL)
        if cand.size == 0:
            return "done", pivots
        c = int(cand[0]) if bland else int(cand[np.argmin(rc[cand])])
        col = T[:, c]
        rows = np.flatnonzero(col > PIVOT_TOL)
        if rows.size == 0:
            return "unbounded", pivots
        beta = np.maximum(T[rows, -1], 0.0)
        ratios = beta / col[rows]
        best = ratios.min()
        ties = rows[ratios <= best + 1e-12 * (1 + best)]
        if bland:
            r = int(min(ties, key=lambda i: tab.basis[i]))
        else:
            r = int(ties[np.argmax(col[ties])])
        tab.pivot(r, c)
        pivots += 1
        if best <= 1e-12:
            degenerate += 1
            if degenerate >= DEGENERATE_RUN:
                bland = True
        else:
            degenerate = 0
            bland = False
        if pivots % REINVERT_EVERY == 0:
            tab.reinvert()


def solve(lp: StandardFormLp, max_iter: int = 50_000) -> LpOutcome:
    """Two-phase simplex. Returns an :class:`LpOutcome`; raises
    :class:`NumericalFailure` only when pivoting breaks down."""
    k, d = lp.k, lp.d
    sign = np.where(lp.rhs < 0, -1.0, 1.0)
    A = lp.A * sign[:, None]
    rhs = lp.rhs * sign
    if k == 0:
        if np.any(lp.cost < -COST_TOL):
            return LpOutcome(UNBOUNDED)
        return LpOutcome(OPTIMAL, 0.0, np.zeros(d), [], np.zeros((0, 0)), np.arange(0))

    # phase 1 on [A | I]
    Aa = np.hstack([A, np.eye(k)])
    tab = _Tableau(Aa, rhs, range(d, d + k))
    cost1 = np.concatenate([np.zeros(d), np.ones(k)])
    _, piv1 = _run(tab, cost1, np.arange(d + k), max_iter)
    infeas = float(np.sum(tab.T[:, -1][np.array(tab.basis) >= d]))
    if infeas > FEAS_TOL * (1 + np.abs(rhs).max()):
        return LpOutcome(INFEASIBLE, pivots=piv1)

    # drive artificials out of the basis; rows where that is impossible are redundant
    keep = np.ones(k, dtype=bool)
    for r in range(k):
        if tab.basis[r] < d:
            continue
        row = tab.T[r, :d]
        nz = np.flatnonzero(np.abs(row) > 1e-7)
        if nz.size:
            tab.pivot(r, int(nz[np.argmax(np.abs(row[nz]))]))
        else:
            keep[r] = False
    if not keep.all():
        log.debug("dropping %d redundant rows", int((~keep).sum()))
        rows = np.flatnonzero(keep)
        basis = [tab.basis[r] for r in rows]
        A, rhs = A[rows], rhs[rows]
    else:
        rows = np.arange(k)
        basis = tab.basis

    tab = _Tableau(A, rhs, basis)
    status, piv2 = _run(tab, lp.cost, np.arange(d), max_iter)
    if status == "unbounded":
        return LpOutcome(UNBOUNDED, pivots=piv1 + piv2)

    Binv = np.linalg.inv(A[:, tab.basis]) * sign[rows][None, :]
    x = np.zeros(d)
    x[tab.basis] = Binv @ lp.rhs[rows]
    resid = np.abs(lp.A[rows] @ x - lp.rhs[rows])
    if np.any(resid > 1e-6 * (1 + np.abs(lp.rhs[rows]))) or x.min() < -1e-6:
        raise NumericalFailure(f"solution check failed (residual {resid.max():.2e}, min x {x.min():.2e})")
    x = np.maximum(x, 0.0)
    return LpOutcome(
        OPTIMAL,
        float(lp.cost @ x),
        x,
        list(tab.basis),
        Binv,
        rows,
        piv1 + piv2,
    )


def reduced_costs(out: LpOutcome, lp: StandardFormLp) -> np.ndarray:
    _require_optimal(out)
    y = lp.cost[out.basis] @ out.basis_inverse
    return lp.cost - y @ lp.A[out.rows]


def _require_optimal(out):
    if out.status != OPTIMAL:
        raise NotOptimal(f"LP status is {out.status}")


def tableau_row(out: LpOutcome, lp: StandardFormLp, basic_pos: int):
    """Row ``basic_pos`` of the optimal tableau: ``(b_bar, abar)`` with
    ``x_B + abar . x_N = b_bar``."""
    _require_optimal(out)
    if not 0 <= basic_pos < len(out.basis):
        raise RowOutOfRange(f"basic position {basic_pos} out of range")
    w = out.basis_inverse[basic_pos]
    abar = w @ lp.A[out.rows]
    abar[out.basis] = 0.0
    abar[out.basis[basic_pos]] = 1.0
    return float(w @ lp.rhs[out.rows]), abar


def append_cut_rows(lp: StandardFormLp, cuts) -> StandardFormLp:
    """Augmented LP: each cut ``gamma . x >= rhs`` becomes ``gamma . x - t = rhs``."""
    cuts = list(cuts)
    if not cuts:
        return lp
    m = len(cuts)
    G = np.zeros((m, lp.d))
    r = np.empty(m)
    for i, cut in enumerate(cuts):
        coef = np.asarray(cut.coefficients, dtype=float)
        if coef.size > lp.d:
            raise DimensionMismatch(f"cut has {coef.size} coefficients, LP has {lp.d} columns")
        G[i, : coef.size] = coef
        r[i] = cut.rhs
    A = np.block([[lp.A, np.zeros((lp.k, m))], [G, -np.eye(m)]])
    return StandardFormLp(A, np.concatenate([lp.rhs, r]), np.concatenate([lp.cost, np.zeros(m)]))


def resolve_with_cuts(lp: StandardFormLp, cuts, max_iter: int = 50_000) -> LpOutcome:
    """Solve ``lp`` with ``cuts`` (objects with ``coefficients`` and ``rhs``) appended."""
    return solve(append_cut_rows(lp, cuts), max_iter=max_iter)
