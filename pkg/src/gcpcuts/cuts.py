"""Corner systems from tableau rows, and GMI / X / GX cuts over them.

For selected tableau rows ``x_B + abar . x_N = b_bar`` the corner relaxation
reads ``R s + P y in b + Z^n`` with ``R``, ``P`` the continuous / integer
nonbasic columns of ``abar``. A fractional ``b_bar_i`` is represented by
``frac(b_bar_i) - 1`` and an integral one by 0, which puts ``-b`` in the
closed unit cell and makes the interior test automatic for any center in
``(0,1)^n``.
"""

from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass, field, replace

import numpy as np

from . import geometry as geo
from .errors import (
    ColumnOutOfRange,
    InputError,
    NoFractionalRow,
    NotSingleRow,
    NotUnimodular,
    RowOutOfRange,
    RowsNotAllFractional,
    TooManyPoints,
    WeightError,
)
from .simplex import LpOutcome, StandardFormLp, tableau_row

log = logging.getLogger(__name__)

INT_TOL = 1e-6


class NotIntegerRow(InputError):
    """A selected row's basic variable is not integer-constrained."""


@dataclass(frozen=True, eq=False)
class CornerSystem:
    b: np.ndarray
    R: np.ndarray
    P: np.ndarray
    r_cols: np.ndarray
    p_cols: np.ndarray
    frac_rows: tuple
    b_bar: np.ndarray = field(default=None, repr=False)

    @property
    def n(self) -> int:
        return len(self.b)

    @property
    def col_map(self) -> np.ndarray:
        return np.concatenate([self.r_cols, self.p_cols])


@dataclass(frozen=True, eq=False)
class NonbasicCut:
    r_coef: np.ndarray
    p_coef: np.ndarray
    rhs: float = 1.0


@dataclass(frozen=True, eq=False)
class StructuralCut:
    coefficients: np.ndarray
    rhs: float = 1.0
    degenerate: bool = False

    def value(self, x) -> float:
        x = np.asarray(x, dtype=float)
        return float(self.coefficients @ x[: self.coefficients.size])


def is_fractional(v, tol=INT_TOL) -> bool:
    return abs(v - round(v)) > tol


def reduce_rhs(b_bar):
    """Representative of ``b_bar`` modulo Z^n: ``frac - 1`` if fractional, else 0."""
    b_bar = np.asarray(b_bar, dtype=float)
    frac = b_bar - np.floor(b_bar)
    integral = (frac <= INT_TOL) | (frac >= 1 - INT_TOL)
    return np.where(integral, 0.0, frac - 1.0)


def fractional_positions(out: LpOutcome, integrality) -> list:
    """Basic positions whose variable is integer-constrained and fractional."""
    integrality = np.asarray(integrality, dtype=bool)
    return [i for i, j in enumerate(out.basis) if integrality[j] and is_fractional(out.x[j])]


def integral_positions(out: LpOutcome, integrality) -> list:
    """Basic positions whose variable is integer-constrained and currently integral."""
    integrality = np.asarray(integrality, dtype=bool)
    return [i for i, j in enumerate(out.basis) if integrality[j] and not is_fractional(out.x[j])]


def build_corner(out: LpOutcome, lp: StandardFormLp, rows, integrality) -> CornerSystem:
    rows = list(rows)
    integrality = np.asarray(integrality, dtype=bool)
    if len(set(rows)) != len(rows):
        raise InputError(f"selected rows are not distinct: {rows}")
    for r in rows:
        if not 0 <= r < len(out.basis):
            raise RowOutOfRange(f"basic position {r} out of range")
        if not integrality[out.basis[r]]:
            raise NotIntegerRow(f"basic variable of row {r} is continuous")
    tab = [tableau_row(out, lp, r) for r in rows]
    b_bar = np.array([t[0] for t in tab])
    abar = np.array([t[1] for t in tab]).reshape(len(rows), lp.d)
    frac = tuple(i for i, v in enumerate(b_bar) if is_fractional(v))
    if not frac:
        raise NoFractionalRow(f"rows {rows} have integral right-hand sides")
    nonbasic = np.ones(lp.d, dtype=bool)
    nonbasic[out.basis] = False
    r_cols = np.flatnonzero(nonbasic & ~integrality)
    p_cols = np.flatnonzero(nonbasic & integrality)
    return CornerSystem(
        b=reduce_rhs(b_bar),
        R=abar[:, r_cols],
        P=abar[:, p_cols],
        r_cols=r_cols,
        p_cols=p_cols,
        frac_rows=frac,
        b_bar=b_bar,
    )


def gmi_cut(cs: CornerSystem) -> NonbasicCut:
    if cs.n != 1:
        raise NotSingleRow(f"GMI needs one row, got {cs.n}")
    f0 = cs.b[0] + 1.0
    if not INT_TOL < f0 < 1 - INT_TOL:
        raise NoFractionalRow("row is not fractional")
    r = cs.R[0]
    p = cs.P[0]
    fp = p - np.floor(p)
    fp = np.where(fp >= 1.0, 0.0, fp)
    return NonbasicCut(
        np.maximum(r / f0, -r / (1 - f0)),
        np.minimum(fp / f0, (1 - fp) / (1 - f0)),
    )


def _check_weights(nu, n):
    nu = np.asarray(nu, dtype=float).ravel()
    if nu.size != n:
        raise WeightError(f"{nu.size} weights for {n} rows")
    return nu


def generate_xcut(cs: CornerSystem, nu) -> NonbasicCut:
    """Cut from the regular cross-polytope (center of ``b+G`` at 0), O(n) per column."""
    nu = _check_weights(nu, cs.n)
    if len(cs.frac_rows) != cs.n:
        raise RowsNotAllFractional(f"{cs.n - len(cs.frac_rows)} selected rows are integral")
    g = geo.build_nested(nu, -cs.b)
    return NonbasicCut(
        geo.gauge_separable(g, cs.b, cs.R.T),
        geo.trivial_lift_separable(g, cs.b, cs.P.T),
    )


def generate_gxcut(cs: CornerSystem, nu, f) -> NonbasicCut:
    """Cut from the cross-polytope with weights ``nu`` centered at ``f`` in ``(0,1)^n``."""
    nu = _check_weights(nu, cs.n)
    f = np.asarray(f, dtype=float).ravel()
    if f.size != cs.n or np.any(f <= INT_TOL) or np.any(f >= 1 - INT_TOL):
        raise InputError(f"center must lie in (0,1)^{cs.n}, got {f}")
    g = geo.build_nested(nu, f)
    fn = geo.normals(g, cs.b)
    r_coef = geo.gauge(fn, cs.R.T) if cs.R.shape[1] else np.zeros(0)
    p_coef = geo.trivial_lift_many(g, cs.b, cs.P.T) if cs.P.shape[1] else np.zeros(0)
    return NonbasicCut(np.asarray(r_coef, dtype=float), np.asarray(p_coef, dtype=float))


def to_structural(cut: NonbasicCut, cs: CornerSystem, total_cols: int) -> StructuralCut:
    cols = cs.col_map
    if cols.size and (cols.min() < 0 or cols.max() >= total_cols):
        raise ColumnOutOfRange(f"column map exceeds {total_cols} columns")
    gamma = np.zeros(total_cols)
    gamma[cols] = np.concatenate([cut.r_coef, cut.p_coef])
    degenerate = not np.any(gamma > 0)
    if degenerate:
        log.warning("cut with all-zero coefficients")
    return StructuralCut(gamma, cut.rhs, degenerate)


def _int_det(U):
    import sympy

    return int(sympy.Matrix(U).det())


def apply_unimodular(cs: CornerSystem, U) -> CornerSystem:
    """Transform the system by an integral matrix with determinant +-1."""
    U = np.asarray(U)
    if U.shape != (cs.n, cs.n):
        raise NotUnimodular(f"U must be {cs.n}x{cs.n}")
    if not np.all(np.asarray(U, dtype=float) == np.round(np.asarray(U, dtype=float))):
        raise NotUnimodular("U is not integral")
    Ui = [[int(round(float(v))) for v in row] for row in U]
    if abs(_int_det(Ui)) != 1:
        raise NotUnimodular(f"det U = {_int_det(Ui)}")
    Uf = np.asarray(Ui, dtype=float)
    b = reduce_rhs(Uf @ cs.b)
    frac = tuple(i for i in range(cs.n) if b[i] != 0.0)
    return replace(cs, b=b, R=Uf @ cs.R, P=Uf @ cs.P, frac_rows=frac,
                   b_bar=None if cs.b_bar is None else Uf @ cs.b_bar)


@dataclass(frozen=True)
class ValidityReport:
    checked: int
    worst_slack: float
    vacuous: bool

    @property
    def ok(self) -> bool:
        return self.vacuous or self.worst_slack >= -1e-6


def check_validity_pure_integer(cut: NonbasicCut, cs: CornerSystem, bound: int) -> ValidityReport:
    """Every ``y in {0..bound}^l`` with ``P y in b + Z^n`` must satisfy the cut."""
    if cs.R.shape[1]:
        raise InputError("exhaustive check requires a system without continuous columns")
    ell = cs.P.shape[1]
    total = (bound + 1) ** ell
    if total > 10**6:
        raise TooManyPoints(f"{total} points exceed 10^6")
    grids = np.meshgrid(*[np.arange(bound + 1)] * ell, indexing="ij")
    Y = np.stack([g.ravel() for g in grids], axis=1).astype(float) if ell else np.zeros((1, 0))
    W = Y @ cs.P.T - cs.b
    hits = np.all(np.abs(W - np.round(W)) <= 1e-7, axis=1)
    Yh = Y[hits]
    if Yh.shape[0] == 0:
        return ValidityReport(0, math.inf, True)
    lhs = Yh @ cut.p_coef
    return ValidityReport(int(Yh.shape[0]), float(lhs.min() - 1.0), False)


def sample_weights(rng, n):
    """Uniform point in the open simplex via normalized exponential spacings."""
    e = rng.exponential(size=n)
    return e / e.sum()
