import pytest

from conftest import line_instance, tiny_random
from lexrouter.model import validate_schedule
from lexrouter.oracle import (BudgetExceeded, EnumerationBudget, brute_force_lex_optimum,
                              enumerate_routes)


def test_single_route():
    inst = line_instance([(60, 0, 480)])
    assert [c.stops for c in enumerate_routes(inst, 0)] == [(0,)]


def test_two_interventions_four_routes(two_jobs):
    assert sorted(c.stops for c in enumerate_routes(two_jobs, 0)) == [(0,), (0, 1), (1,), (1, 0)]


def test_window_order_infeasible():
    # I1 must finish by 100, I0 cannot start before 200
    inst = line_instance([(60, 200, 480), (60, 0, 100)])
    assert (0, 1) not in {c.stops for c in enumerate_routes(inst, 0)}
    assert (1, 0) in {c.stops for c in enumerate_routes(inst, 0)}


def test_empty_instance():
    sol = brute_force_lex_optimum(line_instance([]))
    assert sol.objectives == (0, 0)


def test_duration_beats_cost():
    # each job alone fits, both together do not; the longer one costs more
    inst = line_instance([(60, 0, 100), (90, 0, 150)], positions=[10, 50])
    sol = brute_force_lex_optimum(inst)
    assert [c.stops for c in sol.routes] == [(1,)]


def test_cheaper_vehicle_wins_tie():
    inst = line_instance([(60, 0, 480)], vehicles=((50, None), (40, None)))
    sol = brute_force_lex_optimum(inst)
    assert [c.vehicle for c in sol.routes] == [1]


def test_budget():
    with pytest.raises(BudgetExceeded):
        brute_force_lex_optimum(tiny_random(0, n_i=8, n_v=3), EnumerationBudget(7, 3))
    with pytest.raises(ValueError):
        EnumerationBudget(0, 1)


@pytest.mark.parametrize("seed", range(8))
def test_oracle_output_is_valid(seed):
    inst = tiny_random(seed)
    assert validate_schedule(brute_force_lex_optimum(inst), inst) == []
