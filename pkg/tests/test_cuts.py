import numpy as np
import pytest
from hypothesis import given, strategies as st

from gcpcuts import cuts as cu
from gcpcuts import geometry as geo
from gcpcuts import simplex as sx
from gcpcuts.errors import (
    ColumnOutOfRange,
    NoFractionalRow,
    NotSingleRow,
    NotUnimodular,
    RowOutOfRange,
    RowsNotAllFractional,
    TooManyPoints,
    WeightError,
)


def corner(b, R=None, P=None):
    b = np.asarray(b, dtype=float)
    n = b.size
    R = np.zeros((n, 0)) if R is None else np.asarray(R, dtype=float).reshape(n, -1)
    P = np.zeros((n, 0)) if P is None else np.asarray(P, dtype=float).reshape(n, -1)
    frac = tuple(i for i in range(n) if b[i] != 0)
    return cu.CornerSystem(b, R, P, np.arange(R.shape[1]), R.shape[1] + np.arange(P.shape[1]), frac)


# --- building corners from a tableau --------------------------------------

@pytest.fixture
def two_var():
    """min -x1 - x2, x1 + x2 + s = 1.5, x integer, s continuous."""
    lp = sx.StandardFormLp([[1, 1, 1]], [1.5], [-1, -1, 0])
    return lp, sx.solve(lp), np.array([True, True, False])


def test_reduce_rhs():
    assert cu.reduce_rhs([3.3]) == pytest.approx([-0.7])
    assert cu.reduce_rhs([2.0, -1.25]) == pytest.approx([0.0, -0.25])


def test_build_corner(two_var):
    lp, out, mask = two_var
    cs = cu.build_corner(out, lp, [0], mask)
    assert cs.b == pytest.approx([-0.5])
    assert cs.R.shape == (1, 1) and cs.P.shape == (1, 1)
    assert sorted(cs.col_map.tolist()) == sorted(set(range(3)) - {out.basis[0]})
    assert np.allclose(cs.P, [[1]]) and np.allclose(cs.R, [[1]])


def test_build_corner_errors(two_var):
    lp, out, mask = two_var
    with pytest.raises(RowOutOfRange):
        cu.build_corner(out, lp, [3], mask)
    integral = sx.StandardFormLp([[1, 1, 1]], [2.0], [-1, -1, 0])
    o2 = sx.solve(integral)
    with pytest.raises(NoFractionalRow):
        cu.build_corner(o2, integral, [0], mask)
    with pytest.raises(cu.NotIntegerRow):
        cu.build_corner(out, lp, [0], np.array([False, False, False]))


def test_all_integer_row_gives_empty_corner():
    # with s integer too, x1 + x2 + s = 1.5 has no integer point and GMI says so
    lp = sx.StandardFormLp([[1, 1, 1]], [1.5], [-1, -1, 0])
    out = sx.solve(lp)
    cs = cu.build_corner(out, lp, [0], np.ones(3, dtype=bool))
    cut = cu.to_structural(cu.gmi_cut(cs), cs, lp.d)
    assert cut.degenerate
    assert sx.resolve_with_cuts(lp, [cut]).status == sx.INFEASIBLE


def test_gmi_examples():
    cs = corner([-0.7], R=[[-0.2]], P=[[0.7, 0.3]])
    cut = cu.gmi_cut(cs)
    assert cut.r_coef == pytest.approx([0.285714], abs=1e-6)
    assert cut.p_coef == pytest.approx([0.428571, 1.0], abs=1e-6)
    with pytest.raises(NotSingleRow):
        cu.gmi_cut(corner([-0.5, -0.5]))


def test_gmi_integer_coef_matches_bruteforce():
    # 1-D trivial lifting of the GMI interval [f0 - 1, f0]
    f0 = 0.3
    fn = geo.FacetNormals(np.array([[1 / f0], [-1 / (1 - f0)]]))
    for p in (0.7, 0.3, 1.45, -0.2):
        cut = cu.gmi_cut(corner([f0 - 1], P=[[p]]))
        assert cut.p_coef[0] == pytest.approx(geo.trivial_lift_bruteforce(fn, [p], 3))


def test_two_var_gmi_closes_gap(two_var):
    lp, out, mask = two_var
    cs = cu.build_corner(out, lp, [0], mask)
    cut = cu.to_structural(cu.gmi_cut(cs), cs, lp.d)
    after = sx.resolve_with_cuts(lp, [cut])
    assert after.objective == pytest.approx(-1.0)
    x_cut = cu.to_structural(cu.generate_xcut(cs, [1.0]), cs, lp.d)
    assert np.allclose(x_cut.coefficients, cut.coefficients)


def test_xcut_examples():
    cs = corner([-0.5, -0.5], R=[[0], [0]], P=[[0.25], [0.25]])
    cut = cu.generate_xcut(cs, [0.5, 0.5])
    assert cut.p_coef == pytest.approx([0.5])
    assert cut.r_coef == pytest.approx([0.0])
    with pytest.raises(RowsNotAllFractional):
        cu.generate_xcut(corner([-0.5, 0.0], P=[[0.1], [0.2]]), [0.5, 0.5])
    with pytest.raises(WeightError):
        cu.generate_xcut(cs, [1.0])


def test_gxcut_regular_equals_xcut():
    cs = corner([-0.3], R=[[0.4, -1.2]], P=[[0.25, 1.6]])
    x = cu.generate_xcut(cs, [1.0])
    g = cu.generate_gxcut(cs, [1.0], [0.3])
    assert g.r_coef == pytest.approx(x.r_coef)
    assert g.p_coef == pytest.approx(x.p_coef)


def test_gxcut_interior_with_integral_row():
    cs = corner([-0.5, 0.0], P=[[0.5], [0.5]])
    g = geo.build_nested([0.5, 0.5], [0.5, 0.5])
    w = g.rel_normals @ (-cs.b - g.center)
    # fractional row contributes 0, integral row contributes nu_i * h^- = 0.5 * 2 * 0.5
    assert w.max() == pytest.approx(0.5)
    assert w.max() < 1
    cu.generate_gxcut(cs, [0.5, 0.5], [0.5, 0.5])


def test_gxcut_boundary_column():
    cs = corner([0.5, 0.5], P=[[0.5], [0.5]])
    cs = cu.CornerSystem(np.array([-0.5, -0.5]), cs.R, cs.P, cs.r_cols, cs.p_cols, (0, 1))
    cut = cu.generate_gxcut(cs, [0.5, 0.5], [0.5, 0.5])
    assert cut.p_coef == pytest.approx([1.0])


def test_gxcut_bad_center():
    cs = corner([-0.5], P=[[0.2]])
    with pytest.raises(Exception):
        cu.generate_gxcut(cs, [1.0], [1.0])


def test_to_structural():
    cs = corner([-0.5], R=[[0.3]], P=[[0.2]])
    cut = cu.NonbasicCut(np.array([0.6]), np.array([0.4]))
    sc = cu.to_structural(cut, cs, 2)
    assert sc.coefficients == pytest.approx([0.6, 0.4])
    with pytest.raises(ColumnOutOfRange):
        cu.to_structural(cut, cs, 1)
    zero = cu.to_structural(cu.NonbasicCut(np.zeros(1), np.zeros(1)), cs, 2)
    assert zero.degenerate


def test_apply_unimodular():
    cs = corner([-0.5, -0.5], P=[[1, 0], [0, 1]])
    same = cu.apply_unimodular(cs, np.eye(2, dtype=int))
    assert same.b == pytest.approx(cs.b) and same.P == pytest.approx(cs.P)
    t = cu.apply_unimodular(cs, [[1, 1], [0, 1]])
    assert t.b == pytest.approx([0.0, -0.5])
    assert t.frac_rows == (1,)
    with pytest.raises(NotUnimodular):
        cu.apply_unimodular(cs, [[2, 0], [0, 1]])
    with pytest.raises(NotUnimodular):
        cu.apply_unimodular(cs, [[1, 0.5], [0, 1]])


def test_validity_examples():
    cs = corner([-0.5, -0.5], P=0.5 * np.eye(2))
    cut = cu.generate_gxcut(cs, [0.5, 0.5], [0.5, 0.5])
    rep = cu.check_validity_pure_integer(cut, cs, 3)
    # y/2 in b + Z^2 needs both coordinates odd: (1,1), (1,3), (3,1), (3,3)
    assert rep.checked == 4 and rep.ok
    empty = cu.check_validity_pure_integer(cut, cs, 0)
    assert empty.vacuous and empty.checked == 0
    with pytest.raises(TooManyPoints):
        cu.check_validity_pure_integer(cu.NonbasicCut(np.zeros(0), np.zeros(7)),
                                       corner([-0.5], P=np.ones((1, 7))), 9)


def test_sample_weights_simplex():
    w = cu.sample_weights(np.random.default_rng(0), 4)
    assert w.sum() == pytest.approx(1.0) and np.all(w > 0)


# --- properties -----------------------------------------------------------

def random_pure_corner(rng, n, ell):
    b = -rng.uniform(0.05, 0.95, n)
    b[rng.random(n) < 0.2] = 0.0
    if not np.any(b):
        b[0] = -0.5
    P = rng.integers(-6, 7, (n, ell)) / rng.integers(1, 5, (n, ell))
    return corner(b, P=P)


@given(st.integers(0, 2**31), st.integers(1, 3), st.integers(1, 4))
def test_gxcut_valid(seed, n, ell):
    rng = np.random.default_rng(seed)
    cs = random_pure_corner(rng, n, ell)
    cut = cu.generate_gxcut(cs, cu.sample_weights(rng, n), rng.uniform(0.001, 0.999, n))
    assert np.all(cut.p_coef >= 0) and np.all(cut.p_coef <= 1 + 1e-12)
    assert cu.check_validity_pure_integer(cut, cs, 5).ok


@given(st.integers(0, 2**31), st.integers(1, 3), st.integers(1, 4))
def test_xcut_valid(seed, n, ell):
    rng = np.random.default_rng(seed)
    cs = random_pure_corner(rng, n, ell)
    cs = cu.CornerSystem(np.where(cs.b == 0, -0.5, cs.b), cs.R, cs.P, cs.r_cols, cs.p_cols,
                         tuple(range(n)))
    cut = cu.generate_xcut(cs, cu.sample_weights(rng, n))
    assert cu.check_validity_pure_integer(cut, cs, 5).ok


@given(st.integers(0, 2**31), st.integers(1, 3), st.integers(1, 4))
def test_unimodular_preserves_validity(seed, n, ell):
    rng = np.random.default_rng(seed)
    cs = random_pure_corner(rng, n, ell)
    U = np.eye(n, dtype=int)
    for _ in range(3):
        i, j = rng.choice(n, 2, replace=True)
        if i != j:
            U[i] += int(rng.integers(-2, 3)) * U[j]
    t = cu.apply_unimodular(cs, U)
    if not t.frac_rows:
        return
    cut = cu.generate_gxcut(t, cu.sample_weights(rng, n), rng.uniform(0.001, 0.999, n))
    assert cu.check_validity_pure_integer(cut, t, 4).ok
    assert cu.check_validity_pure_integer(cut, cs, 4).ok


@given(st.integers(0, 2**31))
def test_gmi_equals_single_row_xcut(seed):
    rng = np.random.default_rng(seed)
    cs = corner([-rng.uniform(0.01, 0.99)], R=rng.normal(size=(1, 4)) * 3,
                P=rng.normal(size=(1, 4)) * 3)
    a, b = cu.gmi_cut(cs), cu.generate_xcut(cs, [1.0])
    assert np.abs(a.r_coef - b.r_coef).max() <= 1e-9
    assert np.abs(a.p_coef - b.p_coef).max() <= 1e-9
