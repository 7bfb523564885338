import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from lexrouter import lp


def model_of(sense, objective, rows, integer=False, upper=None):
    m = lp.LinearModel(sense)
    for k, c in enumerate(objective):
        m.add_var(f"x{k}", 0.0, upper if upper is not None else float("inf"), integer, c)
    for k, (coeffs, s, rhs) in enumerate(rows):
        m.add_constraint(f"r{k}", dict(enumerate(coeffs)), s, rhs)
    return m


# (sense, objective, rows, optimum, duals)
CANNED = [
    ("max", [1], [([1], "<=", 1)], 1, [1]),
    ("min", [1], [([1], ">=", 2)], 2, [1]),
    ("max", [3, 2], [([1, 1], "<=", 4), ([1, 0], "<=", 3)], 11, [2, 1]),
    ("max", [1, 1], [([1, 1], "=", 5), ([1, 0], "<=", 3)], 5, [1, 0]),
    ("max", [-1], [([1], ">=", 2)], -2, [-1]),
]


@pytest.mark.parametrize("sense,obj,rows,opt,duals", CANNED)
def test_canned_duals(sense, obj, rows, opt, duals):
    out = lp.solve_lp(model_of(sense, obj, rows))
    assert out.status == lp.OPTIMAL
    assert out.objective == pytest.approx(opt, abs=1e-9)
    assert list(out.duals) == pytest.approx(duals, abs=1e-9)


def test_infeasible():
    out = lp.solve_lp(model_of("max", [1], [([1], "<=", 0), ([1], ">=", 1)]))
    assert out.status == lp.INFEASIBLE


def test_empty_model():
    out = lp.solve_lp(lp.LinearModel("max"))
    assert out.status == lp.OPTIMAL and out.objective == 0


def test_milp_integer_rounding():
    out = lp.solve_milp(model_of("max", [1], [], integer=True, upper=2.5))
    assert out.status == lp.OPTIMAL and out.objective == pytest.approx(2)


def test_milp_knapsack_matches_enumeration():
    values, weights, cap = [10, 7, 4], [5, 4, 3], 8
    out = lp.solve_milp(model_of("max", values, [(weights, "<=", cap)], integer=True, upper=1))
    best = max(sum(v for v, b in zip(values, bits) if b)
               for bits in itertools.product((0, 1), repeat=3)
               if sum(w for w, b in zip(weights, bits) if b) <= cap)
    assert out.status == lp.OPTIMAL
    assert out.objective == pytest.approx(best)
    assert all(abs(x - round(x)) < 1e-6 for x in out.x)
    assert out.bound == pytest.approx(out.objective)


def test_milp_zero_time_limit_never_silently_optimal():
    rng = np.random.default_rng(0)
    n = 40
    rows = [(rng.integers(1, 20, n).tolist(), "<=", 60) for _ in range(10)]
    out = lp.solve_milp(model_of("max", rng.integers(1, 30, n).tolist(), rows,
                                 integer=True, upper=1), time_limit=0)
    assert out.status in (lp.FEASIBLE_LIMIT, lp.ERROR)


def test_constraint_validation():
    m = lp.LinearModel("max")
    m.add_var("x")
    with pytest.raises(ValueError):
        m.add_constraint("bad", {3: 1.0}, "<=", 1.0)
    with pytest.raises(ValueError):
        m.add_constraint("bad", {0: 1.0}, "<=", float("nan"))


def test_write_lp_mentions_every_row():
    text = lp.write_lp(model_of("max", [3, 2], [([1, 1], "<=", 4), ([1, 0], "<=", 3)]))
    assert "Maximize" in text and "r0:" in text and "r1:" in text


@given(st.integers(1, 4), st.integers(1, 4), st.integers(0, 10_000))
@settings(max_examples=40, deadline=None)
def test_strong_duality(n, m, seed):
    rng = np.random.default_rng(seed)
    a = rng.integers(1, 6, size=(m, n))
    b = rng.integers(1, 20, size=m)
    c = rng.integers(-3, 6, size=n)
    out = lp.solve_lp(model_of("max", c.tolist(), [(row.tolist(), "<=", float(r))
                                                   for row, r in zip(a, b)]))
    assert out.status == lp.OPTIMAL
    assert out.objective == pytest.approx(float(np.dot(b, out.duals)), abs=1e-6)
    assert (np.asarray(out.duals) >= -1e-9).all()
