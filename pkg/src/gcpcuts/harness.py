"""Experiment drivers: the cut-comparison loop, gap closure, the bad-lifting triangle, CSV output."""

from __future__ import annotations

import csv
import io
import json
import logging
import math
import time
import zlib
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from . import cuts as cu
from . import geometry as geo
from .errors import InputError, IpUnavailable, NotEnoughFractionalRows
from .instances import MipInstance
from .reference import branch_and_bound
from .simplex import OPTIMAL, StandardFormLp, resolve_with_cuts, solve

log = logging.getLogger(__name__)

BETA_TOL = 1e-9
F_MARGIN = 0.001
VIOLATION_TOL = 1e-9

CSV_COLUMNS = ["instance", "seed", "N", "k", "ell", "q", "LP", "GMI", "X", "XG", "GX", "GXG",
               "Best", "beta", "gap_gmi", "gap_best", "time_ms"]


@dataclass(frozen=True)
class RunConfig:
    N: int = 2
    k: int = 5
    ell: int = 5
    q: int = 1
    seed: int = 0
    node_limit: int = 2000
    solve_ip: bool = False
    timing: bool = False
    keep_cuts: bool = False

    def __post_init__(self):
        if self.N < 1:
            raise InputError(f"N must be >= 1, got {self.N}")
        if not 1 <= self.q <= self.N:
            raise InputError(f"q must lie in 1..N, got q={self.q}, N={self.N}")
        if self.k < 1 or self.ell < 1:
            raise InputError(f"k and ell must be >= 1, got k={self.k}, ell={self.ell}")


@dataclass
class RunReport:
    instance: str
    seed: int
    N: int
    k: int
    ell: int
    q: int
    LP: float
    GMI: float
    X: float
    XG: float
    GX: float
    GXG: float
    Best: float
    beta: float
    gap_gmi: Optional[float] = None
    gap_best: Optional[float] = None
    time_ms: Optional[float] = None
    IP: Optional[float] = None
    n_gmi: int = 0
    n_x: int = 0
    n_gx: int = 0
    max_cut_value: float = -math.inf
    flags: tuple = ()
    phase_ms: dict = field(default_factory=dict, repr=False)
    cuts: list = field(default_factory=list, repr=False)


def beta(lp: float, gmi: float, best: float) -> float:
    """Relative improvement ``(best - gmi) / (gmi - lp)`` of the new families over GMI; 0 if GMI = LP."""
    den = gmi - lp
    if den < BETA_TOL:
        return 0.0
    return (best - gmi) / den


def gap_closed(obj: float, lp: float, ip: Optional[float]) -> Optional[float]:
    if ip is None or not math.isfinite(ip) or ip - lp < BETA_TOL:
        return None
    return (obj - lp) / (ip - lp)


def instance_rng(seed: int, name: str) -> np.random.Generator:
    return np.random.default_rng([int(seed), zlib.crc32(name.encode())])


def _objective(out) -> float:
    return out.objective if out.status == OPTIMAL else math.inf


class _Cutter:
    """Shared state for generating cuts from the root LP of one instance."""

    def __init__(self, inst: MipInstance, lp: StandardFormLp, out):
        self.inst, self.lp, self.out = inst, lp, out
        self.mask = inst.integer_mask
        self.frac = cu.fractional_positions(out, self.mask)
        self.integral = cu.integral_positions(out, self.mask)
        self.max_value = -math.inf
        self.emitted = []

    def _emit(self, cut, cs):
        sc = cu.to_structural(cut, cs, self.lp.d)
        self.max_value = max(self.max_value, sc.value(self.out.x))
        self.emitted.append(sc)
        return sc

    def gmi(self):
        return [self._emit(cu.gmi_cut(cs), cs)
                for cs in (cu.build_corner(self.out, self.lp, [r], self.mask) for r in self.frac)]

    def xcut(self, rng, N):
        rows = sorted(rng.choice(self.frac, size=N, replace=False).tolist())
        cs = cu.build_corner(self.out, self.lp, rows, self.mask)
        return self._emit(cu.generate_xcut(cs, cu.sample_weights(rng, N)), cs)

    def gxcut(self, rng, N, q):
        """q fractional rows plus N - q integral ones; short on integral rows, more fractional rows fill in."""
        n_int = max(min(N - q, len(self.integral)), N - len(self.frac))
        n_frac = N - n_int
        rows = rng.choice(self.frac, size=n_frac, replace=False).tolist()
        if n_int:
            rows += rng.choice(self.integral, size=n_int, replace=False).tolist()
        rows = sorted(rows)
        cs = cu.build_corner(self.out, self.lp, rows, self.mask)
        nu = cu.sample_weights(rng, N)
        f = rng.uniform(F_MARGIN, 1.0 - F_MARGIN, N)
        return self._emit(cu.generate_gxcut(cs, nu, f), cs)


def run_algorithm2(inst: MipInstance, cfg: RunConfig) -> RunReport:
    """Root LP, GMI on every fractional row, then ``ell`` independent rounds of ``k`` X- and GX-cuts."""
    t0 = time.perf_counter()
    phase = {}
    rng = instance_rng(cfg.seed, inst.name)
    lp = inst.to_lp()
    out = solve(lp)
    if out.status != OPTIMAL:
        raise InputError(f"{inst.name}: LP relaxation is {out.status}")
    LP = out.objective
    cutter = _Cutter(inst, lp, out)
    flags = []
    N = cfg.N
    if len(cutter.frac) < cfg.q:
        raise NotEnoughFractionalRows(
            f"{inst.name}: {len(cutter.frac)} fractional rows, GX-cuts need q={cfg.q}")
    # GX-cuts draw on integer-basic rows only; with fewer than N of them, use all
    N_gx = min(N, len(cutter.frac) + len(cutter.integral))

    gmi_cuts = cutter.gmi()
    GMI = _objective(resolve_with_cuts(lp, gmi_cuts))
    phase["gmi"] = time.perf_counter() - t0

    do_x = len(cutter.frac) >= N
    if not do_x:
        flags.append("x_skipped")
    if N_gx < N:
        flags.append("gx_rows_reduced")
    if len(cutter.integral) < N_gx - cfg.q:
        flags.append("gx_filled")

    X = XG = GX = GXG = -math.inf
    n_x = n_gx = 0
    for _ in range(cfg.ell):
        if do_x:
            xc = [cutter.xcut(rng, N) for _ in range(cfg.k)]
            n_x += len(xc)
            X = max(X, _objective(resolve_with_cuts(lp, xc)))
            XG = max(XG, _objective(resolve_with_cuts(lp, xc + gmi_cuts)))
        gc = [cutter.gxcut(rng, N_gx, cfg.q) for _ in range(cfg.k)]
        n_gx += len(gc)
        GX = max(GX, _objective(resolve_with_cuts(lp, gc)))
        GXG = max(GXG, _objective(resolve_with_cuts(lp, gc + gmi_cuts)))
    if not do_x:
        X, XG = LP, GMI
    phase["rounds"] = time.perf_counter() - t0 - phase["gmi"]

    Best = max(X, XG, GX, GXG)
    IP = None
    if cfg.solve_ip:
        ip = branch_and_bound(inst, cfg.node_limit)
        if ip.status == OPTIMAL:
            IP = ip.objective
        else:
            flags.append(f"ip_{ip.status.lower()}")
        phase["ip"] = time.perf_counter() - t0 - phase["gmi"] - phase["rounds"]
    elapsed = (time.perf_counter() - t0) * 1000.0
    return RunReport(
        instance=inst.name, seed=cfg.seed, N=N, k=cfg.k, ell=cfg.ell, q=cfg.q,
        LP=LP, GMI=GMI, X=X, XG=XG, GX=GX, GXG=GXG, Best=Best,
        beta=beta(LP, GMI, Best),
        gap_gmi=gap_closed(GMI, LP, IP), gap_best=gap_closed(Best, LP, IP),
        time_ms=elapsed if cfg.timing else None, IP=IP,
        n_gmi=len(gmi_cuts), n_x=n_x, n_gx=n_gx,
        max_cut_value=cutter.max_value, flags=tuple(flags),
        phase_ms={k: v * 1000.0 for k, v in phase.items()},
        cuts=cutter.emitted if cfg.keep_cuts else [],
    )


# --- closure ---------------------------------------------------------------

@dataclass
class ClosureReport:
    instance: str
    seed: int
    num_cuts: int
    LP: float
    GMI: float
    family: float
    IP: Optional[float]
    gap_gmi: Optional[float]
    gap_family: Optional[float]
    n_gmi: int
    rounds: int


def _pool_resolve(lp, base, pool, batch=50, max_rounds=200):
    """Optimum of ``lp`` with ``base + pool`` cuts, adding violated pool cuts lazily.

    Stops when the optimum satisfies every pool cut, so it equals the
    all-at-once optimum.
    """
    active = list(base)
    if not pool:
        return resolve_with_cuts(lp, active), 0
    G = np.array([c.coefficients for c in pool])
    used = np.zeros(len(pool), dtype=bool)
    for rounds in range(1, max_rounds + 1):
        out = resolve_with_cuts(lp, active)
        if out.status != OPTIMAL:
            return out, rounds
        slack = G @ out.x[: lp.d] - 1.0
        slack[used] = np.inf
        viol = np.flatnonzero(slack < -VIOLATION_TOL)
        if viol.size == 0:
            return out, rounds
        pick = viol[np.argsort(slack[viol], kind="stable")[:batch]]
        used[pick] = True
        active.extend(pool[i] for i in pick)
    raise RuntimeError("lazy cut loop did not settle")


def run_closure(inst: MipInstance, num_cuts: int, cfg: RunConfig, ip: Optional[float] = None) -> ClosureReport:
    """GMI cuts plus ``num_cuts`` random X/GX cuts (half each) added in one shot."""
    rng = instance_rng(cfg.seed, inst.name)
    lp = inst.to_lp()
    out = solve(lp)
    if out.status != OPTIMAL:
        raise InputError(f"{inst.name}: LP relaxation is {out.status}")
    if ip is None:
        res = branch_and_bound(inst, cfg.node_limit)
        if res.status != OPTIMAL:
            raise IpUnavailable(f"{inst.name}: branch and bound ended with {res.status}")
        ip = res.objective
    cutter = _Cutter(inst, lp, out)
    if not cutter.frac:
        return ClosureReport(inst.name, cfg.seed, num_cuts, out.objective, out.objective,
                             out.objective, ip, gap_closed(out.objective, out.objective, ip),
                             gap_closed(out.objective, out.objective, ip), 0, 0)
    gmi_cuts = cutter.gmi()
    gmi_obj = _objective(resolve_with_cuts(lp, gmi_cuts))
    n_rows = min(cfg.N, len(cutter.frac))
    n_x = num_cuts // 2
    pool = [cutter.xcut(rng, n_rows) for _ in range(n_x)]
    pool += [cutter.gxcut(rng, max(n_rows, cfg.q), cfg.q) for _ in range(num_cuts - n_x)]
    fam, rounds = _pool_resolve(lp, gmi_cuts, pool)
    fam_obj = _objective(fam)
    return ClosureReport(
        inst.name, cfg.seed, num_cuts, out.objective, gmi_obj, fam_obj, ip,
        gap_closed(gmi_obj, out.objective, ip), gap_closed(fam_obj, out.objective, ip),
        len(gmi_cuts), rounds,
    )


def certified_pool(make, count: int, node_limit: int = 5000, screen_seconds: float = 1.0,
                   max_draws: int = 2000) -> list:
    """First ``count`` instances ``make(0), make(1), ...`` whose IP branch and bound solves.

    HiGHS with a short time limit screens out infeasible and hard draws first,
    which keeps the scan cheap; the IP value returned is always from
    :func:`branch_and_bound`. Returns ``(instance, ip_value)`` pairs.
    The screen runs against a wall-clock limit, so which draws survive can
    vary between machines; freeze the indices when reproducibility matters.
    """
    from scipy.optimize import Bounds, LinearConstraint, milp

    pool = []
    for idx in range(max_draws):
        inst = make(idx)
        screen = milp(inst.cost, constraints=LinearConstraint(inst.A, inst.rhs, inst.rhs),
                      integrality=inst.integer_mask.astype(int), bounds=Bounds(0, np.inf),
                      options={"time_limit": screen_seconds})
        if screen.status != 0:
            continue
        res = branch_and_bound(inst, node_limit)
        if res.status == OPTIMAL:
            pool.append((inst, res.objective))
            if len(pool) == count:
                return pool
    raise IpUnavailable(f"only {len(pool)} of {count} instances certified in {max_draws} draws")


# --- bad trivial lifting -----------------------------------------------------

BADLIFT_B = (-0.5, -0.5)
BADLIFT_P = (0.25, 0.0)


@dataclass(frozen=True)
class BadliftRow:
    i: int
    trivial: float
    pi_min: float
    ratio: float
    delta: float


def run_badlift(i_values, n_max: int, p=BADLIFT_P, b=BADLIFT_B) -> list:
    """Trivial lift at ``p`` against the lower bound on every lifting, for the triangles ``T_i``."""
    rows = []
    p = np.asarray(p, dtype=float)
    b = np.asarray(b, dtype=float)
    for i in i_values:
        T = geo.make_badlift_triangle(int(i))
        box = geo.bounding_box(T)
        trivial = geo.trivial_lift_bruteforce(T, p, bounds=box)
        lifts = [geo.trivial_lift_bruteforce(T, b - N * p, bounds=box) for N in range(1, n_max + 1)]
        pi_min = max((1.0 - v) / N for N, v in enumerate(lifts, start=1))
        ratio = trivial / pi_min if pi_min > 0 else math.inf
        rows.append(BadliftRow(int(i), trivial, pi_min, ratio, 1.0 - min(lifts)))
    return rows


# --- output ------------------------------------------------------------------

def fmt_num(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (int, np.integer)) and not isinstance(v, bool):
        return str(int(v))
    v = float(v)
    if math.isnan(v):
        return "nan"
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    return f"{v:.17g}"


def csv_text(reports) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in sorted(reports, key=lambda r: (r.instance, r.N, r.seed)):
        w.writerow([r.instance] + [fmt_num(getattr(r, c)) for c in CSV_COLUMNS[1:]])
    return buf.getvalue()


def write_csv(reports, path) -> None:
    Path(path).write_text(csv_text(reports))


CLOSURE_COLUMNS = ["instance", "seed", "num_cuts", "LP", "GMI", "family", "IP", "gap_gmi", "gap_family"]


def closure_csv_text(reports) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CLOSURE_COLUMNS)
    for r in sorted(reports, key=lambda r: r.instance):
        w.writerow([r.instance] + [fmt_num(getattr(r, c)) for c in CLOSURE_COLUMNS[1:]])
    return buf.getvalue()


def summarize(reports) -> dict:
    """Aggregate beta statistics over finite-beta reports."""
    betas = np.array([r.beta for r in reports if math.isfinite(r.beta)])
    improved = betas[betas > 1e-6]
    return {
        "instances": len(reports),
        "finite_beta": int(betas.size),
        "frac_improved": float(improved.size / betas.size) if betas.size else float("nan"),
        "mean_beta_improved": float(improved.mean()) if improved.size else 0.0,
        "mean_beta": float(betas.mean()) if betas.size else float("nan"),
        "min_beta": float(betas.min()) if betas.size else float("nan"),
    }


# --- GCP descriptor files ----------------------------------------------------

def load_gcp(text: str):
    """Parse a GCP JSON document into ``(descriptor, b or None)``.

    Nested: ``{"kind": "nested", "nu": [...], "f": [...], "b": [...]}``.
    Recursive: ``{"kind": "recursive", "gamma1": int, "stages": [{"gamma", "mu", "c"}, ...], "b": [...]}``.
    ``b`` is optional.
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"GCP file is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise InputError("GCP file must hold a JSON object")
    kind = str(doc.get("kind", "nested")).lower()
    try:
        if kind == geo.NESTED:
            g = geo.build_nested(doc["nu"], doc["f"])
        elif kind == geo.RECURSIVE:
            g = geo.build_recursive(doc["gamma1"], doc.get("stages", []))
        else:
            raise InputError(f"unknown GCP kind {kind!r}")
    except KeyError as exc:
        raise InputError(f"GCP file lacks field {exc}") from exc
    b = doc.get("b")
    return g, (None if b is None else np.asarray(b, dtype=float))
