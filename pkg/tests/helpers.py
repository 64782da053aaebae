"""Random generalized cross-polytopes and oracle helpers shared by the tests."""

import math

import numpy as np
from scipy.spatial import ConvexHull

from gcpcuts import geometry as geo


def random_nested(rng, n, min_weight=0.0):
    while True:
        nu = rng.dirichlet(np.full(n, 2.0))
        if nu.min() > min_weight:
            break
    f = rng.uniform(-3, 3, n)
    f = np.where(np.abs(f - np.round(f)) < 0.02, f + 0.1, f)
    return geo.build_nested(nu, f)


def random_recursive(rng, n, drift=False):
    """Stage centers repeat the previous center unless ``drift``, which picks any interior point."""
    gamma1 = int(rng.integers(-2, 3))
    g = geo.build_recursive(gamma1, [])
    stages = []
    for _ in range(1, n):
        if drift:
            V = geo.vertices(g)
            c = rng.dirichlet(np.ones(len(V))) @ V
        else:
            c = g.center
        gamma = rng.uniform(-3, 3)
        if abs(gamma - round(gamma)) < 0.02:
            gamma += 0.1
        stages.append((gamma, rng.uniform(0.2, 0.8), c))
        g = geo.build_recursive(gamma1, stages)
    return g


def random_shift(rng, g):
    """A ``b`` with the origin strictly inside ``b + G`` (minus a point of the open anchor cell)."""
    return -(g.z + rng.uniform(0.02, 0.98, g.n))


def lattice_box(g, b):
    V = geo.vertices(g, b)
    return V.min(axis=0), V.max(axis=0)


def box_count(lo, hi):
    return math.prod(int(math.floor(h) - math.ceil(l) + 4) for l, h in zip(lo, hi))


def random_gcp(rng, n, max_box=60_000, drift=0.0):
    """Nested or recursive descriptor plus shift, small enough to enumerate.

    ``drift`` is the chance that a recursive descriptor uses drifting centers.
    """
    while True:
        kind = rng.integers(2)
        if kind == 0:
            g = random_nested(rng, n, 0.3 / n)
        else:
            g = random_recursive(rng, n, drift=bool(rng.random() < drift))
        b = random_shift(rng, g)
        lo, hi = lattice_box(g, b)
        if box_count(lo, hi) <= max_box:
            return g, b, (lo, hi)


def hull_normals(points):
    """Facet normals (``a . x <= 1``) of the convex hull of ``points`` via qhull."""
    hull = ConvexHull(points)
    eq = hull.equations
    A = eq[:, :-1] / (-eq[:, -1:])
    return np.unique(np.round(A, 9), axis=0)


def same_rows(A, B, tol=1e-7):
    A = np.asarray(A)
    B = np.asarray(B)
    if A.shape != B.shape:
        return False
    used = set()
    for a in A:
        d = np.abs(B - a).max(axis=1)
        hits = [i for i in np.flatnonzero(d <= tol) if i not in used]
        if not hits:
            return False
        used.add(hits[0])
    return True


VERDICTS = []


def verdict(num, ok, detail):
    """Record and print one acceptance line; the caller still asserts."""
    line = f"[{'PASS' if ok else 'FAIL'}] {num:>2}. {detail}"
    VERDICTS.append(line)
    print(line)
    return ok
