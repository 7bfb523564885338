import itertools
from fractions import Fraction

import pytest

from conftest import line_instance, tiny_random
from lexrouter.master import (ColumnPool, DualValues, MasterState, Phase, closure_threshold,
                              reduced_cost, solve_integer_restricted, solve_master_lp)
from lexrouter.model import compute_big_m, make_column, validate_schedule
from lexrouter.oracle import enumerate_routes


def test_empty_pool():
    inst = line_instance([(60, 0, 480), (90, 0, 480)])
    u, duals, _ = solve_master_lp(ColumnPool(), Phase.duration(), inst)
    assert u == 0
    assert duals.nu == (0.0, 0.0) and duals.mu == (0.0,)


def test_single_column():
    inst = line_instance([(60, 0, 480)])
    u, _, _ = solve_master_lp(ColumnPool([make_column((0,), 0, inst)]), Phase.duration(), inst)
    assert u == pytest.approx(60)


def test_two_columns_same_vehicle_pick_larger():
    inst = line_instance([(60, 0, 480), (90, 0, 480)])
    pool = ColumnPool([make_column((0,), 0, inst), make_column((1,), 0, inst)])
    u, _, out = solve_master_lp(pool, Phase.duration(), inst)
    assert u == pytest.approx(90)
    assert list(out.x) == pytest.approx([0, 1])


def test_pool_deduplicates():
    inst = line_instance([(60, 0, 480)])
    col = make_column((0,), 0, inst)
    pool = ColumnPool([col])
    assert not pool.add(col)
    assert pool.add_all([col, col]) == 0 and len(pool) == 1
    assert col in pool and pool.copy()[0] == col


def test_reduced_cost_formulas(two_jobs):
    col = make_column((0, 1), 0, two_jobs)
    zero = DualValues.zeros(two_jobs)
    assert reduced_cost(col, zero, Phase.duration()) == col.duration
    assert reduced_cost(col, zero, Phase.weighted(8)) == pytest.approx(
        8 * col.duration - float(col.cost))
    duals = DualValues((5.0, 7.0), (3.0,), rho=2.0)
    assert reduced_cost(col, duals, Phase.cost(100)) == pytest.approx(
        2.0 * col.duration - float(col.cost) - 3 - 12)


@pytest.mark.parametrize("phase", ["weighted", "duration", "cost"])
def test_basic_columns_have_zero_reduced_cost(phase):
    inst = tiny_random(3)
    cols = [c for v in range(len(inst.vehicles)) for c in enumerate_routes(inst, v)]
    pool = ColumnPool(cols)
    ph = {"weighted": Phase.weighted(compute_big_m(inst).value), "duration": Phase.duration(),
          "cost": Phase.cost(max(c.duration for c in cols))}[phase]
    u, duals, out = solve_master_lp(pool, ph, inst)
    for r, x in enumerate(out.x):
        rc = reduced_cost(pool[r], duals, ph)
        assert rc <= 1e-6 * max(1.0, abs(u))
        if x > 1e-6:
            assert abs(rc) <= 1e-6 * max(1.0, abs(u))


def test_integral_lp_gives_equal_bounds():
    inst = line_instance([(60, 0, 480), (90, 0, 480)])
    pool = ColumnPool([make_column((0, 1), 0, inst)])
    u, _, _ = solve_master_lp(pool, Phase.duration(), inst)
    sol, ell, _ = solve_integer_restricted(pool, Phase.duration(), inst)
    assert ell == Fraction(150) and u == pytest.approx(float(ell))
    assert validate_schedule(sol, inst) == []


def test_overlapping_columns_at_most_one():
    inst = line_instance([(60, 0, 480)], vehicles=((50, None), (40, None)))
    pool = ColumnPool([make_column((0,), 0, inst), make_column((0,), 1, inst)])
    sol, _, _ = solve_integer_restricted(pool, Phase.duration(), inst)
    assert len(sol.routes) == 1


def test_five_column_pool_matches_subset_enumeration():
    inst = tiny_random(11, n_i=6, n_v=2)
    cols = [c for v in range(2) for c in enumerate_routes(inst, v)]
    cols = sorted(cols, key=lambda c: (-c.duration, c.key))[:5]
    pool = ColumnPool(cols)
    phase = Phase.weighted(compute_big_m(inst).value)
    _, ell, _ = solve_integer_restricted(pool, phase, inst)
    best = Fraction(0)
    for bits in itertools.product((0, 1), repeat=5):
        pick = [c for c, b in zip(cols, bits) if b]
        covs = [i for c in pick for i in c.coverage]
        vehs = [c.vehicle for c in pick]
        if len(set(covs)) == len(covs) and len(set(vehs)) == len(vehs):
            best = max(best, sum((phase.value(c.duration, c.cost) for c in pick), Fraction(0)))
    assert ell == best


def test_cost_phase_duals_sign():
    inst = line_instance([(60, 0, 480), (90, 0, 480)], vehicles=((50, None), (40, None)))
    pool = ColumnPool([make_column(s, v, inst) for v in (0, 1) for s in ((0,), (1,), (0, 1))])
    _, duals, _ = solve_master_lp(pool, Phase.cost(150), inst)
    assert duals.rho >= 0


def test_closure_threshold():
    assert closure_threshold(MasterState(Phase.duration(), u=90.0, ell=Fraction(90))) == 0
    assert closure_threshold(MasterState(Phase.duration(), u=100.0, ell=Fraction(90))) == -10
    with pytest.raises(ValueError):
        closure_threshold(MasterState(Phase.duration()))


def test_non_improving_column_leaves_lp_unchanged():
    inst = tiny_random(5)
    cols = [c for v in range(len(inst.vehicles)) for c in enumerate_routes(inst, v)]
    pool = ColumnPool(cols[: len(cols) // 2])
    u, duals, _ = solve_master_lp(pool, Phase.duration(), inst)
    extra = [c for c in cols[len(cols) // 2:] if reduced_cost(c, duals, Phase.duration()) <= 0]
    pool.add_all(extra)
    u2, _, _ = solve_master_lp(pool, Phase.duration(), inst)
    assert u2 == pytest.approx(u, abs=1e-6)
