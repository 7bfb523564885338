from fractions import Fraction

import pytest

from conftest import line_instance, tiny_random
from lexrouter.driver import METHODS, RunConfig, solve
from lexrouter.model import validate_schedule
from lexrouter.oracle import brute_force_lex_optimum


@pytest.mark.parametrize("method", METHODS)
def test_zero_interventions(method):
    sol, stats = solve(line_instance([]), method)
    assert sol.objectives == (0, 0) and sol.exact
    assert all(p.iterations == 0 for p in stats.phases)


def test_one_vehicle_one_job_duration_phase():
    inst = line_instance([(60, 0, 480)])
    sol, stats = solve(inst, "cg-s")
    first = stats.phases[0]
    assert first.u == pytest.approx(60) and first.ell == 60
    assert sol.exact and stats.d_star == 60


@pytest.mark.parametrize("method", METHODS)
def test_nothing_servable(method):
    inst = line_instance([(60, 0, 480)], positions=[250])  # cannot return by day end
    sol, _ = solve(inst, method)
    assert sol.objectives == (0, 0)


@pytest.mark.parametrize("seed", range(6))
def test_all_methods_match_oracle(seed):
    inst = tiny_random(seed + 100)
    best = brute_force_lex_optimum(inst).objectives
    for method in METHODS:
        sol, stats = solve(inst, method, time_limit=60)
        assert sol.objectives == best, method
        assert sol.exact
        assert validate_schedule(sol, inst) == []
        if method == "cg-s":
            assert sol.f1 == stats.d_star


@pytest.mark.parametrize("seed", range(4))
def test_relaxation_does_not_change_bounds(seed):
    inst = tiny_random(seed + 40)
    for method in ("cg-w", "cg-s"):
        _, on = solve(inst, method, relaxation=True)
        _, off = solve(inst, method, relaxation=False)
        for a, b in zip(on.phases, off.phases):
            assert a.ell == b.ell
            assert a.u == pytest.approx(b.u, abs=1e-6)


@pytest.mark.parametrize("seed", range(4))
def test_bounds_hold_every_iteration(seed):
    inst = tiny_random(seed + 60)
    for method in ("cg-w", "cg-s"):
        _, stats = solve(inst, method, initial_pool="empty", eta=1)
        for p in stats.phases:
            assert p.bound_ok
            assert p.u + 1e-6 * max(1.0, abs(p.u)) >= float(p.ell)


def test_run_is_deterministic():
    inst = tiny_random(7)
    a = solve(inst, "cg-w", seed=3)
    b = solve(inst, "cg-w", seed=3)
    assert a[1].to_dict() == b[1].to_dict()
    assert a[0].routes == b[0].routes


def test_cost_phase_keeps_an_already_cheapest_solution():
    inst = line_instance([(60, 0, 480)])
    sol, stats = solve(inst, "cg-s")
    assert sol.f2 == Fraction(70)
    assert stats.phases[1].ell == -70


def test_config_validation():
    with pytest.raises(ValueError):
        RunConfig(time_limit=0)
    with pytest.raises(ValueError):
        RunConfig.for_method("cg-x")
    with pytest.raises(ValueError):
        RunConfig(initial_pool="warm")
