"""Ground-truth oracles: LP-based branch and bound, exhaustive enumeration."""

from __future__ import annotations

import heapq
import itertools
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import TooManyPoints
from .instances import MipInstance
from .simplex import OPTIMAL, UNBOUNDED, StandardFormLp, solve

INT_TOL = 1e-6
ENUM_LIMIT = 10**6


@dataclass(eq=False)
class IpOutcome:
    status: str  # Optimal | Infeasible | NodeLimit | Unbounded
    objective: float
    incumbent: Optional[np.ndarray]
    nodes: int
    bound: float = float("-inf")


def _with_bounds(inst: MipInstance, bounds) -> StandardFormLp:
    """LP relaxation plus one equality row per branching bound.

    ``x_j <= u`` becomes ``x_j + s = u``; ``x_j >= l`` becomes ``x_j - s = l``.
    """
    if not bounds:
        return inst.to_lp()
    m = len(bounds)
    k, d = inst.A.shape
    A = np.zeros((k + m, d + m))
    A[:k, :d] = inst.A
    rhs = np.concatenate([inst.rhs, np.zeros(m)])
    for i, (j, upper, val) in enumerate(bounds):
        A[k + i, j] = 1.0
        A[k + i, d + i] = 1.0 if upper else -1.0
        rhs[k + i] = val
    return StandardFormLp(A, rhs, np.concatenate([inst.cost, np.zeros(m)]))


def _most_fractional(x, mask):
    frac = np.abs(x - np.round(x))
    frac[~mask] = 0.0
    j = int(np.argmax(frac))
    return j if frac[j] > INT_TOL else None


def _tighten(bounds, j, upper, val):
    # drop a bound on the same side of x_j that the new one supersedes
    kept = [b for b in bounds if not (b[0] == j and b[1] == upper)]
    return tuple(kept) + ((j, upper, val),)


def branch_and_bound(inst: MipInstance, node_limit: int = 10_000, cutoff: float = math.inf) -> IpOutcome:
    """Best-bound branch and bound, branching on the most fractional integer variable."""
    d = inst.d
    mask = inst.integer_mask
    incumbent = None
    best = cutoff
    nodes = 0
    counter = itertools.count()
    heap = [(-math.inf, next(counter), ())]
    while heap:
        bound, _, bounds = heapq.heappop(heap)
        if bound >= best - INT_TOL:
            continue
        if nodes >= node_limit:
            heapq.heappush(heap, (bound, next(counter), bounds))
            break
        nodes += 1
        out = solve(_with_bounds(inst, bounds))
        if out.status == UNBOUNDED and not bounds:
            return IpOutcome("Unbounded", -math.inf, None, nodes)
        if out.status != OPTIMAL or out.objective >= best - INT_TOL:
            continue
        x = out.x[:d]
        j = _most_fractional(x, mask)
        if j is None:
            best = out.objective
            incumbent = x.copy()
            incumbent[mask] = np.round(incumbent[mask])
            continue
        v = x[j]
        heapq.heappush(heap, (out.objective, next(counter), _tighten(bounds, j, True, math.floor(v))))
        heapq.heappush(heap, (out.objective, next(counter), _tighten(bounds, j, False, math.ceil(v))))

    open_bound = min((b for b, _, _ in heap), default=math.inf)
    if heap and open_bound < best - INT_TOL:
        return IpOutcome("NodeLimit", best, incumbent, nodes, open_bound)
    if incumbent is None:
        return IpOutcome("Infeasible", math.inf, None, nodes)
    return IpOutcome("Optimal", best, incumbent, nodes, best)


def enumerate_feasible(inst: MipInstance, box) -> list:
    """Feasible points with integer variables ranging over ``0..box_j``.

    Continuous variables are completed by a feasibility LP; one completion is
    returned per feasible integer assignment.
    """
    box = np.broadcast_to(np.asarray(box, dtype=int), (inst.d,))
    ints = np.flatnonzero(inst.integer_mask)
    conts = np.flatnonzero(~inst.integer_mask)
    total = math.prod(int(box[j]) + 1 for j in ints)
    if total > ENUM_LIMIT:
        raise TooManyPoints(f"{total} integer assignments exceed {ENUM_LIMIT}")
    A_I, A_C = inst.A[:, ints], inst.A[:, conts]
    if ints.size:
        grids = np.meshgrid(*[np.arange(box[j] + 1) for j in ints], indexing="ij")
        Y = np.stack([g.ravel() for g in grids], axis=1).astype(float)
    else:
        Y = np.zeros((1, 0))
    resid = inst.rhs[None, :] - Y @ A_I.T
    points = []
    if conts.size == 0:
        ok = np.all(np.abs(resid) <= 1e-9 * (1 + np.abs(inst.rhs)), axis=1)
        for y in Y[ok]:
            x = np.zeros(inst.d)
            x[ints] = y
            points.append(x)
        return points
    for y, r in zip(Y, resid):
        out = solve(StandardFormLp(A_C, r, np.zeros(conts.size)))
        if out.status == OPTIMAL:
            x = np.zeros(inst.d)
            x[ints] = y
            x[conts] = out.x
            points.append(x)
    return points
