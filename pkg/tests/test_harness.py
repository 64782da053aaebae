import math

import numpy as np
import pytest

from gcpcuts import harness as h
from gcpcuts import instances as ins
from gcpcuts.errors import InputError, IpUnavailable, NotEnoughFractionalRows

K3 = [(0, 1), (0, 2), (1, 2)]


@pytest.mark.parametrize("best, expected", [(1.0, 0.0), (1.5, 0.5), (1.981, 0.981)])
def test_beta_examples(best, expected):
    assert h.beta(0.0, 1.0, best) == pytest.approx(expected)


def test_beta_zero_denominator():
    assert h.beta(2.0, 2.0, 3.0) == 0.0


def test_gap_closed():
    assert h.gap_closed(1.5, 1.0, 2.0) == pytest.approx(0.5)
    assert h.gap_closed(1.5, 1.0, None) is None
    assert h.gap_closed(1.0, 1.0, 1.0) is None


def test_config_validation():
    with pytest.raises(InputError):
        h.RunConfig(N=2, q=3)
    with pytest.raises(InputError):
        h.RunConfig(N=0)
    with pytest.raises(InputError):
        h.RunConfig(k=0)


@pytest.fixture(scope="module")
def dense_report():
    inst = ins.gen_random_dense(1, "integer", "mixed", seed=7)
    return inst, h.run_algorithm2(inst, h.RunConfig(N=2, seed=1, keep_cuts=True, solve_ip=True))


def test_report_ordering(dense_report):
    _, r = dense_report
    assert r.LP <= r.GMI + 1e-9
    assert r.Best == max(r.X, r.XG, r.GX, r.GXG)
    assert r.XG >= r.GMI - 1e-7 and r.GXG >= r.GMI - 1e-7
    assert r.beta >= -1e-6
    assert r.n_gx == 25 and len(r.cuts) == r.n_gmi + r.n_x + r.n_gx
    assert r.time_ms is None


def test_cuts_separate_lp_point(dense_report):
    _, r = dense_report
    assert r.max_cut_value < 1 - 1e-6


def test_ip_bounds_cuts(dense_report):
    _, r = dense_report
    if r.IP is not None:
        assert r.Best <= r.IP + 1e-6
        assert 0 <= r.gap_gmi <= r.gap_best + 1e-9 <= 1 + 1e-6


def test_rerun_identical(dense_report):
    inst, r = dense_report
    again = h.run_algorithm2(inst, h.RunConfig(N=2, seed=1, keep_cuts=True, solve_ip=True))
    assert h.csv_text([r]) == h.csv_text([again])


def test_integral_lp_raises():
    inst = ins.gen_graph_instance(4, 0.0)
    with pytest.raises(NotEnoughFractionalRows):
        h.run_algorithm2(inst, h.RunConfig())


def test_triangle_run():
    inst = ins.gen_graph_instance(3, 1.0, edges=K3)
    r = h.run_algorithm2(inst, h.RunConfig(N=2, seed=0))
    assert r.LP == pytest.approx(-1.5)
    assert r.GMI >= r.LP


def test_csv_header_only():
    assert h.csv_text([]) == ",".join(h.CSV_COLUMNS) + "\n"


def test_fmt_num():
    assert h.fmt_num(None) == ""
    assert h.fmt_num(3) == "3"
    assert h.fmt_num(0.1) == "0.10000000000000001"
    assert h.fmt_num(math.inf) == "inf"


def test_summarize():
    rows = [h.RunReport("a", 0, 2, 5, 5, 1, 0, 1, 0, 0, 0, 0, 0, b) for b in (0.0, 0.2, 0.4, math.nan)]
    s = h.summarize(rows)
    assert s["finite_beta"] == 3
    assert s["frac_improved"] == pytest.approx(2 / 3)
    assert s["mean_beta_improved"] == pytest.approx(0.3)


def test_closure_without_cuts_equals_gmi():
    inst = ins.gen_random_dense(1, "integer", "mixed", seed=6)
    r = h.run_closure(inst, 0, h.RunConfig(seed=0))
    assert r.family == pytest.approx(r.GMI)
    r2 = h.run_closure(inst, 40, h.RunConfig(seed=0), ip=r.IP)
    assert r.GMI - 1e-7 <= r2.family <= r.IP + 1e-6


def test_closure_needs_ip():
    inst = ins.gen_random_dense(1, "integer", "mixed", seed=4)
    with pytest.raises(IpUnavailable):
        h.run_closure(inst, 10, h.RunConfig())


def test_pool_resolve_matches_all_at_once():
    from gcpcuts.simplex import resolve_with_cuts
    inst = ins.gen_random_dense(1, "integer", "mixed", seed=2)
    lp = inst.to_lp()
    out = h.solve(lp)
    c = h._Cutter(inst, lp, out)
    rng = np.random.default_rng(0)
    base = c.gmi()
    pool = [c.gxcut(rng, 2, 1) for _ in range(60)]
    lazy, _ = h._pool_resolve(lp, base, pool, batch=7)
    full = resolve_with_cuts(lp, base + pool)
    assert lazy.objective == pytest.approx(full.objective, abs=1e-7)


def test_badlift_small():
    rows = h.run_badlift([1, 10], 20)
    assert [r.trivial for r in rows] == [1.0, 1.0]
    assert rows[0].delta > rows[1].delta > 0
    assert rows[0].ratio == pytest.approx(rows[0].trivial / rows[0].pi_min)


def test_load_gcp():
    g, b = h.load_gcp('{"kind": "nested", "nu": [0.5, 0.5], "f": [0.5, 0.5], "b": [-0.5, -0.5]}')
    assert b.tolist() == [-0.5, -0.5]
    assert g.n == 2
    g, b = h.load_gcp('{"kind": "recursive", "gamma1": 1, "stages": []}')
    assert b is None
    with pytest.raises(InputError):
        h.load_gcp("[1, 2]")
    with pytest.raises(InputError):
        h.load_gcp('{"kind": "simplex"}')
    with pytest.raises(InputError):
        h.load_gcp('{"kind": "nested", "nu": [1]}')
