"""Generalized cross-polytopes: construction, facet normals, gauges, trivial liftings.

A polytope ``B = {x : a^i . x <= 1}`` containing the origin in its interior is
carried around as a :class:`FacetNormals`. Its gauge is ``max_i a^i . r``.

Generalized cross-polytopes are described by a :class:`GcpDescriptor` that is
independent of the shift ``b``; :func:`normals` produces the facet normals of
``b + G``. Normals of a descriptor are kept *relative to its center*: if ``w``
is such a normal then ``G = {x : w . (x - center) <= 1}``.
"""

from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .errors import (
    CenterNotInterior,
    DegenerateCenter,
    DegenerateGamma,
    DimensionMismatch,
    NotRegular,
    OriginNotInterior,
    WeightError,
)

log = logging.getLogger(__name__)

GEOM_TOL = 1e-9
INTERIOR_TOL = 1e-12
WEIGHT_TOL = 1e-12

NESTED = "nested"
RECURSIVE = "recursive"


@dataclass(frozen=True)
class Stage:
    """One step of the recursive construction: new coordinate ``gamma``,
    weight ``mu`` and the point ``c`` of the previous polytope to expand around."""

    gamma: float
    mu: float
    c: tuple


@dataclass(frozen=True, eq=False)
class GcpDescriptor:
    kind: str
    center: np.ndarray
    z: np.ndarray
    rel_normals: np.ndarray = field(repr=False)
    nu: Optional[np.ndarray] = None
    gamma1: Optional[int] = None
    stages: tuple = ()

    @property
    def n(self) -> int:
        return len(self.center)

    @property
    def f(self) -> np.ndarray:
        return self.center


@dataclass(frozen=True, eq=False)
class FacetNormals:
    normals: np.ndarray

    @property
    def n(self) -> int:
        return self.normals.shape[1]

    @property
    def m(self) -> int:
        return self.normals.shape[0]


def _interval_normals(gamma):
    # normals of I_floor(gamma) - gamma, i.e. of [fl - gamma, fl + 1 - gamma]
    fl = math.floor(gamma)
    return 1.0 / (fl + 1 - gamma), 1.0 / (fl - gamma)


def _near_integer(x, tol=GEOM_TOL):
    return abs(x - round(x)) <= tol


def sign_patterns(n):
    """All sign vectors in {+1,-1}^n, in the order used for cross-polytope normals."""
    return np.array(list(itertools.product((1, -1), repeat=n)), dtype=float)


def build_nested(nu, f) -> GcpDescriptor:
    """Cross-polytope with normalized weights ``nu`` centered at ``f``.

    Relative normals are ``w^s_i = nu_i * h_i^{s_i}`` with
    ``h^+ = 1/(z+1-f)`` and ``h^- = 1/(z-f)``, ``z = floor(f)``.
    """
    nu = np.asarray(nu, dtype=float).ravel()
    f = np.asarray(f, dtype=float).ravel()
    if nu.shape != f.shape:
        raise DimensionMismatch(f"nu has {nu.size} entries, f has {f.size}")
    if nu.size == 0:
        raise WeightError("empty weight vector")
    if np.any(nu <= 0) or abs(nu.sum() - 1.0) > WEIGHT_TOL:
        raise WeightError(f"weights must be positive and sum to 1, got {nu}")
    if np.any(np.abs(f - np.round(f)) <= GEOM_TOL):
        raise DegenerateCenter(f"center {f} has an integral coordinate")
    z = np.floor(f)
    h_plus = 1.0 / (z + 1 - f)
    h_minus = 1.0 / (z - f)
    signs = sign_patterns(len(f))
    h = np.where(signs > 0, h_plus, h_minus)
    return GcpDescriptor(
        kind=NESTED, center=f, z=z, rel_normals=nu * h, nu=nu
    )


def _as_stage(s):
    if isinstance(s, Stage):
        return s
    if isinstance(s, dict):
        return Stage(float(s["gamma"]), float(s["mu"]), tuple(np.atleast_1d(s["c"]).tolist()))
    gamma, mu, c = s
    return Stage(float(gamma), float(mu), tuple(np.atleast_1d(c).tolist()))


def build_recursive(gamma1, stages: Sequence) -> GcpDescriptor:
    """Generalized cross-polytope from the recursive construction.

    ``gamma1`` is the integer left end point of the starting interval; each
    stage is a ``Stage`` (or ``(gamma, mu, c)`` tuple / dict) with ``c`` a
    point strictly inside the polytope built so far.
    """
    if not _near_integer(gamma1):
        raise DegenerateGamma(f"gamma_1={gamma1} must be an integer left end point")
    gamma1 = int(round(gamma1))
    stages = tuple(_as_stage(s) for s in stages)

    G = np.array([[2.0], [-2.0]])  # [gamma1, gamma1+1] about its midpoint
    center = np.array([gamma1 + 0.5])
    z = [float(gamma1)]
    for j, st in enumerate(stages, start=2):
        c = np.asarray(st.c, dtype=float)
        if c.shape != center.shape:
            raise DimensionMismatch(f"stage {j}: c has {c.size} entries, expected {center.size}")
        if not 0.0 < st.mu < 1.0:
            raise WeightError(f"stage {j}: mu={st.mu} not in (0,1)")
        if _near_integer(st.gamma):
            raise DegenerateGamma(f"stage {j}: gamma={st.gamma} is integral")
        denom = 1.0 - G @ (c - center)
        if np.any(denom <= INTERIOR_TOL):
            raise CenterNotInterior(f"stage {j}: c={c.tolist()} not strictly interior")
        G = G / denom[:, None]
        hp, hm = _interval_normals(st.gamma)
        m = G.shape[0]
        G = np.vstack([
            np.hstack([st.mu * G, np.full((m, 1), (1 - st.mu) * hp)]),
            np.hstack([st.mu * G, np.full((m, 1), (1 - st.mu) * hm)]),
        ])
        center = np.append(c, st.gamma)
        z.append(float(math.floor(st.gamma)))
    return GcpDescriptor(
        kind=RECURSIVE,
        center=center,
        z=np.array(z),
        rel_normals=G,
        gamma1=gamma1,
        stages=stages,
    )


def vertices(g: GcpDescriptor, b=None) -> np.ndarray:
    """The 2n vertices of ``b + G`` obtained directly from the convex-hull definition.

    Independent of the normal computations; used as an oracle.
    """
    shift = np.zeros(g.n) if b is None else np.asarray(b, dtype=float)
    if g.kind == NESTED:
        V = []
        for i in range(g.n):
            for end in (g.z[i] + 1, g.z[i]):
                v = g.center.copy()
                v[i] = g.center[i] + (end - g.center[i]) / g.nu[i]
                V.append(v)
        return np.array(V) + shift
    V = np.array([[float(g.gamma1)], [float(g.gamma1 + 1)]])
    for st in g.stages:
        c = np.asarray(st.c, dtype=float)
        top = (V - c) / st.mu + c
        top = np.hstack([top, np.full((len(top), 1), st.gamma)])
        fl = math.floor(st.gamma)
        ends = [st.gamma + (e - st.gamma) / (1 - st.mu) for e in (fl, fl + 1)]
        side = np.array([np.append(c, e) for e in ends])
        V = np.vstack([top, side])
    return V + shift


def normals(g: GcpDescriptor, b) -> FacetNormals:
    """Facet normals ``a^s`` with ``b + G = {x : a^s . x <= 1}``."""
    b = np.asarray(b, dtype=float).ravel()
    if b.size != g.n:
        raise DimensionMismatch(f"b has {b.size} entries, descriptor has dimension {g.n}")
    p0 = b + g.center
    denom = 1.0 + g.rel_normals @ p0
    if np.any(denom <= INTERIOR_TOL):
        raise OriginNotInterior(f"origin is not strictly inside b+G for b={b.tolist()}")
    return FacetNormals(g.rel_normals / denom[:, None])


def _check_dim(fn, r):
    r = np.asarray(r, dtype=float)
    if r.shape[-1] != fn.n:
        raise DimensionMismatch(f"vector of length {r.shape[-1]} for dimension {fn.n}")
    return r


def gauge(fn: FacetNormals, r):
    """``max(0, max_i a^i . r)``; ``r`` may be one point or a 2-D array of points."""
    r = _check_dim(fn, r)
    if r.ndim == 1:
        return max(0.0, float(np.max(fn.normals @ r)))
    return np.maximum(0.0, np.max(r @ fn.normals.T, axis=1))


def is_regular(g: GcpDescriptor, b, tol=GEOM_TOL) -> bool:
    return g.kind == NESTED and bool(np.all(np.abs(np.asarray(b, dtype=float) + g.center) <= tol))


def _regular_intervals(g, b):
    if not is_regular(g, b):
        raise NotRegular("center of b+G is not at the origin")
    b = np.asarray(b, dtype=float)
    lower = b + g.z  # interval of b+G along axis i is [lower, lower + 1]
    return lower, lower + 1.0


def _check_points(g, x):
    x = np.asarray(x, dtype=float)
    if x.shape[-1] != g.n:
        raise DimensionMismatch(f"vector of length {x.shape[-1]} for dimension {g.n}")
    return x


def gauge_separable(g: GcpDescriptor, b, r):
    """O(n) gauge of a regular cross-polytope: ``sum_i nu_i max(r_i/u_i, r_i/l_i)``.

    ``r`` may be a single vector or a 2-D array with one point per row.
    """
    lower, upper = _regular_intervals(g, b)
    r = _check_points(g, r)
    vals = np.maximum(r / upper, r / lower) @ g.nu
    return float(vals) if r.ndim == 1 else vals


def interval_lift(t, lower, upper):
    """Trivial lifting of the interval ``[lower, upper]`` (``upper - lower = 1``,
    ``lower < 0 < upper``) evaluated at ``t``; vectorized over arrays."""
    frac = np.asarray(t, dtype=float) - np.floor(t)
    frac = np.where(frac >= 1.0, 0.0, frac)
    return np.minimum(frac / upper, (1.0 - frac) / -np.asarray(lower))


def trivial_lift_separable(g: GcpDescriptor, b, p):
    """O(n) trivial lifting of a regular cross-polytope (one point or one per row)."""
    lower, upper = _regular_intervals(g, b)
    p = _check_points(g, p)
    vals = np.minimum(1.0, interval_lift(p, lower, upper) @ g.nu)
    return float(vals) if p.ndim == 1 else vals


def anchor_translate(anchor, p):
    """Unique translate of ``p`` in the half-open cell ``anchor + [0,1)^n``."""
    off = p - anchor
    frac = off - np.floor(off)
    frac[frac >= 1.0] = 0.0
    return anchor + frac


def _axis_min(A, v, j):
    """Exact ``min_{M in Z} max_i (v_i + M A_ij)``, returning 1 if no integer
    of the segment ``{lambda : phi(lambda) <= 1}`` exists."""
    s = A[:, j]
    slack = 1.0 - v
    pos = s > 0
    neg = s < 0
    if not pos.any() or not neg.any():
        raise ValueError("polytope is unbounded along a coordinate axis")
    if np.any(slack[~(pos | neg)] < 0):
        return 1.0
    hi = math.floor(np.min(slack[pos] / s[pos]))
    lo = math.ceil(np.max(slack[neg] / s[neg]))
    if lo > hi:
        return 1.0

    def phi(M):
        return float(np.max(v + M * s))

    while lo < hi:
        mid = (lo + hi) // 2
        if phi(mid + 1) < phi(mid):
            lo = mid + 1
        else:
            hi = mid
    return phi(lo)


def _axis_min_breakpoint(A, v, j, p_hat):
    # two extreme-slope normals, their crossing lambda_bar, then floor/ceil;
    # the full max is evaluated at both integers so the result never undercuts.
    s = A[:, j]
    nonpos = np.flatnonzero(s <= 0)
    pos = np.flatnonzero(s > 0)
    if nonpos.size == 0 or pos.size == 0:
        raise ValueError("polytope is unbounded along a coordinate axis")
    best_neg = nonpos[s[nonpos] == s[nonpos].max()]
    a_minus = best_neg[np.argmax(v[best_neg])]
    best_pos = pos[s[pos] == s[pos].min()]
    a_plus = best_pos[np.argmax(v[best_pos])]
    lam = (v[a_plus] - v[a_minus]) / (s[a_minus] - s[a_plus])
    cands = (math.floor(lam), math.ceil(lam))
    return min(float(np.max(v + M * s)) for M in cands)


def split_slopes(g: GcpDescriptor, tol=GEOM_TOL):
    """Per-coordinate slopes ``(c_plus, c_minus)`` if the gauge about the center splits by coordinate.

    Splitting means ``max_s w^s . d = sum_i max(c_plus_i d_i, -c_minus_i d_i)``.
    Nested descriptors always split; recursive ones do when every stage reuses
    the previous center. Returns ``None`` otherwise.
    """
    W = g.rel_normals
    cp = W.max(axis=0)
    cm = -W.min(axis=0)
    if np.any(cp <= 0) or np.any(cm <= 0):
        return None
    atol = tol * np.maximum(cp, cm)
    if not np.all((np.abs(W - cp) <= atol) | (np.abs(W + cm) <= atol)):
        return None
    codes = (W > 0) @ (1 << np.arange(g.n, dtype=np.int64))
    if np.unique(codes).size != 2**g.n:
        return None
    return cp, cm


def _split_lift_one(cp, cm, theta, k0, p):
    """First ``lam`` in [0, 1] with ``G(lam) = sum_i h_i(p_i - lam k0_i) - lam <= 0``.

    ``h_i(t) = min(c+ frac(t), c- (1 - frac(t)))`` is continuous and piecewise
    linear with kinks where ``t`` is in ``Z`` or ``Z + theta_i``, so ``G`` is
    linear between consecutive kinks and the first root is found exactly.
    """

    def G(lam):
        t = p - lam[:, None] * k0
        frac = t - np.floor(t)
        return np.minimum(cp * frac, cm * (1.0 - frac)).sum(axis=1) - lam

    ends = np.array([0.0, 1.0])
    g_ends = G(ends)
    if g_ends[0] <= 0:
        return 0.0
    if g_ends[1] > 0:
        return 1.0
    knots = [ends]
    for pi, ki, th in zip(p, k0, theta):
        if ki == 0.0:
            continue
        lo, hi = sorted((pi - ki, pi))
        m = np.arange(math.floor(lo) - 1, math.ceil(hi) + 1, dtype=float)
        knots.append((pi - m) / ki)
        knots.append((pi - m - th) / ki)
    lam = np.unique(np.concatenate(knots))
    lam = lam[(lam >= 0.0) & (lam <= 1.0)]
    vals = G(lam)
    j = int(np.argmax(vals <= 0))
    a, b_, ga, gb = lam[j - 1], lam[j], vals[j - 1], vals[j]
    return float(min(b_, a + ga * (b_ - a) / (ga - gb)))


def _split_lift(cp, cm, k0, P):
    """Smallest ``lam`` in [0,1] such that some translate of each row of ``P`` lies in ``lam (b+G)``.

    With ``k0`` the center of ``b+G`` that is ``sum_i min_k max(c+ (t_i+k), -c- (t_i+k)) <= lam``
    for ``t = p - lam k0``; the feasible ``lam`` form a ray starting at the answer.
    """
    theta = cm / (cp + cm)
    return np.array([_split_lift_one(cp, cm, theta, k0, p) for p in P])


_warned = set()


def _enumerate_lift(g, b, fn, P):
    if id(g) not in _warned:
        _warned.add(id(g))
        log.warning("gauge of descriptor does not split by coordinate; lifting by enumeration")
    V = vertices(g, b)
    box = (V.min(axis=0), V.max(axis=0))
    return np.array([trivial_lift_bruteforce(fn, p, bounds=box) for p in P])


def _exact_lift(g, b, fn, P):
    slopes = split_slopes(g)
    if slopes is None:
        return _enumerate_lift(g, b, fn, P)
    k0 = np.asarray(b, dtype=float) + g.center
    return _split_lift(*slopes, k0, P)


def trivial_lift(g: GcpDescriptor, b, p, method: str = "exact") -> float:
    """Trivial lifting ``min(1, min_z gauge(p + z))`` of the gauge of ``b + G``.

    ``method="exact"`` (default) scans the dilates ``lam (b+G)`` for the first
    one meeting ``p + Z^n``, which is cheap when the gauge splits by coordinate
    and falls back to enumerating the vertex box otherwise.

    ``method="axis"`` moves the translate of ``p`` in the anchor cell
    ``b + z + [0,1)^n`` along each coordinate axis and takes the best integer
    step by convex search; ``"breakpoint"`` tries only floor/ceil of the slope
    change. Both are upper bounds; they can miss translates that leave the
    anchor cell in two or more coordinates when ``n >= 3``.
    """
    fn = normals(g, b)
    p = np.asarray(p, dtype=float).ravel()
    if p.size != g.n:
        raise DimensionMismatch(f"vector of length {p.size} for dimension {g.n}")
    if method == "exact":
        return float(_exact_lift(g, b, fn, p[None, :])[0])
    p_hat = anchor_translate(np.asarray(b, dtype=float) + g.z, p)
    return _lift_from_translate(fn.normals, p_hat, method)


def _lift_from_translate(A, p_hat, method="axis"):
    v = A @ p_hat
    best = 1.0
    for j in range(A.shape[1]):
        if method == "axis":
            m = _axis_min(A, v, j)
        elif method == "breakpoint":
            m = _axis_min_breakpoint(A, v, j, p_hat)
        else:
            raise ValueError(f"unknown method {method!r}")
        best = min(best, m)
    return max(0.0, best)


def trivial_lift_many(g: GcpDescriptor, b, points) -> np.ndarray:
    """:func:`trivial_lift` (exact) for many points at once, one per row of ``points``."""
    fn = normals(g, b)
    points = np.atleast_2d(_check_points(g, points))
    return _exact_lift(g, b, fn, points)


def trivial_lift_bruteforce(fn: FacetNormals, p, radius: int = 5, bounds=None) -> float:
    """``min(1, min_z gauge(p + z))`` by enumeration.

    With ``bounds=(lo, hi)`` (a box containing ``{gauge <= 1}``) the integer
    translates enumerated are exactly those landing in the box; otherwise
    ``z`` ranges over ``{-radius..radius}^n``.
    """
    p = _check_dim(fn, p).ravel()
    if bounds is None:
        ranges = [np.arange(-radius, radius + 1)] * fn.n
    else:
        lo, hi = (np.asarray(x, dtype=float) for x in bounds)
        ranges = [
            np.arange(math.ceil(lo[i] - p[i]) - 1, math.floor(hi[i] - p[i]) + 2)
            for i in range(fn.n)
        ]
    grids = np.meshgrid(*ranges, indexing="ij")
    Z = np.stack([gr.ravel() for gr in grids], axis=1).astype(float)
    best = 1.0
    chunk = 200_000
    for start in range(0, len(Z), chunk):
        vals = gauge(fn, p + Z[start:start + chunk])
        best = min(best, float(vals.min()))
    return best


def pi_min_truncated(fn: FacetNormals, b, p, n_max: int, radius: int = 5, bounds=None) -> float:
    """Lower bound ``max_{1<=N<=n_max} (1 - lift(b - N p)) / N`` on any lifting at ``p``.

    Not clamped at zero. ``radius`` and ``bounds`` go to :func:`trivial_lift_bruteforce`.
    """
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    b = np.asarray(b, dtype=float)
    p = np.asarray(p, dtype=float)
    return max(
        (1.0 - trivial_lift_bruteforce(fn, b - N * p, radius, bounds)) / N
        for N in range(1, n_max + 1)
    )


def make_badlift_triangle(i: int) -> FacetNormals:
    """Triangle ``T_i`` bounded by ``20x - y + 10.5``, ``a x + y + (1-a)/2``
    and ``-c x + y + (1+c)/2`` with ``a = 1 + 1/i``, ``c = 1/i``."""
    if i < 1:
        raise ValueError("i must be >= 1")
    alpha = 1.0 + 1.0 / i
    beta = 1.0 / i
    lines = [
        (20.0, -1.0, 10.5),
        (alpha, 1.0, (1.0 - alpha) / 2.0),
        (-beta, 1.0, (1.0 + beta) / 2.0),
    ]
    # ax + by + c vs. its value c at the origin: side containing 0 is a.x <= 1
    A = np.array([[-ax / c, -ay / c] for ax, ay, c in lines])
    return FacetNormals(A)


def bounding_box(fn: FacetNormals):
    """Axis-aligned box containing ``{x : a^i . x <= 1}`` (via LPs)."""
    from scipy.optimize import linprog

    n = fn.n
    lo, hi = np.empty(n), np.empty(n)
    ones = np.ones(fn.m)
    for i in range(n):
        e = np.zeros(n)
        e[i] = 1.0
        for sgn, out in ((1.0, lo), (-1.0, hi)):
            res = linprog(sgn * e, A_ub=fn.normals, b_ub=ones, bounds=[(None, None)] * n)
            if res.status != 0:
                raise ValueError("polytope is unbounded")
            out[i] = sgn * res.fun
    return lo, hi
