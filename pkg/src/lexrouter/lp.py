"""Solver-agnostic linear and mixed-integer models, backed by HiGHS via scipy.

Dual convention: ``SolveOutcome.duals[c]`` is the derivative of the optimal
objective with respect to the right-hand side of constraint ``c``, in the
model's own sense.  For a maximisation this makes duals of ``<=`` rows
non-negative and duals of ``>=`` rows non-positive.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np
from scipy import sparse
from scipy.optimize import LinearConstraint, linprog, milp

OPTIMAL = "optimal"
FEASIBLE_LIMIT = "feasible-limit"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"
ERROR = "error"


@dataclass
class Variable:
    name: str
    lower: float = 0.0
    upper: float = math.inf
    is_integer: bool = False


@dataclass
class Constraint:
    name: str
    coeffs: dict[int, float]
    sense: str  # "<=" | ">=" | "="
    rhs: float


@dataclass
class LinearModel:
    sense: str = "max"
    variables: list[Variable] = field(default_factory=list)
    constraints: list[Constraint] = field(default_factory=list)
    objective: dict[int, float] = field(default_factory=dict)
    hint: dict[int, float] | None = None

    def add_var(self, name: str, lower: float = 0.0, upper: float = math.inf,
                integer: bool = False, obj: float = 0.0) -> int:
        self.variables.append(Variable(name, lower, upper, integer))
        j = len(self.variables) - 1
        if obj:
            self.objective[j] = obj
        return j

    def add_constraint(self, name: str, coeffs: dict[int, float], sense: str, rhs: float) -> int:
        if sense not in ("<=", ">=", "="):
            raise ValueError(f"bad constraint sense {sense!r}")
        if not math.isfinite(rhs):
            raise ValueError(f"constraint {name!r}: rhs must be finite")
        n = len(self.variables)
        for j in coeffs:
            if not 0 <= j < n:
                raise ValueError(f"constraint {name!r} references undeclared variable {j}")
        self.constraints.append(Constraint(name, dict(coeffs), sense, float(rhs)))
        return len(self.constraints) - 1

    @property
    def is_mip(self) -> bool:
        return any(v.is_integer for v in self.variables)

    def objective_value(self, x) -> float:
        return float(sum(c * x[j] for j, c in self.objective.items()))


@dataclass
class SolveOutcome:
    status: str
    x: np.ndarray | None = None
    objective: float | None = None
    duals: np.ndarray | None = None
    bound: float | None = None
    wall_time: float = 0.0
    message: str = ""

    @property
    def has_solution(self) -> bool:
        return self.x is not None and self.status in (OPTIMAL, FEASIBLE_LIMIT)


def _arrays(model: LinearModel):
    n = len(model.variables)
    m = len(model.constraints)
    rows, cols, vals = [], [], []
    for r, con in enumerate(model.constraints):
        for j, a in con.coeffs.items():
            if a:
                rows.append(r)
                cols.append(j)
                vals.append(a)
    a = sparse.csr_matrix((vals, (rows, cols)), shape=(m, n))
    c = np.zeros(n)
    for j, v in model.objective.items():
        c[j] = v
    lo = np.array([v.lower for v in model.variables], dtype=float)
    hi = np.array([v.upper for v in model.variables], dtype=float)
    return a, c, lo, hi


def _empty(model: LinearModel, start: float) -> SolveOutcome:
    ok = all((con.sense == "<=" and con.rhs >= 0) or (con.sense == ">=" and con.rhs <= 0)
             or (con.sense == "=" and con.rhs == 0) for con in model.constraints)
    if not ok:
        return SolveOutcome(INFEASIBLE, wall_time=time.perf_counter() - start)
    return SolveOutcome(OPTIMAL, np.zeros(0), 0.0, np.zeros(len(model.constraints)), 0.0,
                        time.perf_counter() - start)


def solve_lp(model: LinearModel) -> SolveOutcome:
    """Solve the continuous model; report primal values and row duals."""
    start = time.perf_counter()
    if model.is_mip:
        raise ValueError("solve_lp called on a model with integer variables")
    if not model.variables:
        return _empty(model, start)
    a, c, lo, hi = _arrays(model)
    sign = -1.0 if model.sense == "max" else 1.0
    senses = [con.sense for con in model.constraints]
    ub_rows = [r for r, s in enumerate(senses) if s != "="]
    eq_rows = [r for r, s in enumerate(senses) if s == "="]
    flip = np.array([-1.0 if senses[r] == ">=" else 1.0 for r in ub_rows])
    rhs = np.array([con.rhs for con in model.constraints])
    kw = {}
    if ub_rows:
        kw["A_ub"] = sparse.diags(flip) @ a[ub_rows]
        kw["b_ub"] = flip * rhs[ub_rows]
    if eq_rows:
        kw["A_eq"] = a[eq_rows]
        kw["b_eq"] = rhs[eq_rows]
    bounds = list(zip(lo, [None if math.isinf(h) else h for h in hi]))
    try:
        res = linprog(sign * c, bounds=bounds, method="highs", **kw)
    except Exception as exc:  # noqa: BLE001 - backend failure becomes a status
        return SolveOutcome(ERROR, message=str(exc), wall_time=time.perf_counter() - start)
    wall = time.perf_counter() - start
    if res.status == 2:
        return SolveOutcome(INFEASIBLE, message=res.message, wall_time=wall)
    if res.status == 3:
        return SolveOutcome(UNBOUNDED, message=res.message, wall_time=wall)
    if res.status != 0:
        return SolveOutcome(ERROR, message=res.message, wall_time=wall)
    duals = np.zeros(len(model.constraints))
    if ub_rows:
        # d(native obj)/d(b) = sign * d(min obj)/d(b_ub) * flip
        duals[ub_rows] = sign * flip * res.ineqlin.marginals
    if eq_rows:
        duals[eq_rows] = sign * res.eqlin.marginals
    return SolveOutcome(OPTIMAL, np.asarray(res.x), sign * res.fun, duals, sign * res.fun,
                        wall, res.message)


def solve_milp(model: LinearModel, time_limit: float | None = None) -> SolveOutcome:
    """Solve the model with integrality; ``time_limit`` in seconds."""
    start = time.perf_counter()
    if not model.variables:
        return _empty(model, start)
    a, c, lo, hi = _arrays(model)
    sign = -1.0 if model.sense == "max" else 1.0
    rl = np.full(len(model.constraints), -np.inf)
    ru = np.full(len(model.constraints), np.inf)
    for r, con in enumerate(model.constraints):
        if con.sense in ("<=", "="):
            ru[r] = con.rhs
        if con.sense in (">=", "="):
            rl[r] = con.rhs
    integrality = np.array([1 if v.is_integer else 0 for v in model.variables])
    options = {"mip_rel_gap": 0.0, "presolve": True}
    if time_limit is not None:
        if time_limit <= 0:
            return SolveOutcome(ERROR, message="time limit reached before solve",
                                wall_time=time.perf_counter() - start)
        options["time_limit"] = float(time_limit)
    cons = [LinearConstraint(a, rl, ru)] if model.constraints else []
    try:
        res = milp(sign * c, constraints=cons, integrality=integrality,
                   bounds=(lo, hi), options=options)
    except Exception as exc:  # noqa: BLE001
        return SolveOutcome(ERROR, message=str(exc), wall_time=time.perf_counter() - start)
    wall = time.perf_counter() - start
    bound = getattr(res, "mip_dual_bound", None)
    bound = None if bound is None or not np.isfinite(bound) else sign * bound
    if res.status == 0:
        obj = sign * res.fun
        return SolveOutcome(OPTIMAL, np.asarray(res.x), obj, None, obj, wall, res.message)
    if res.status == 1:
        if res.x is not None:
            return SolveOutcome(FEASIBLE_LIMIT, np.asarray(res.x), sign * res.fun, None,
                                bound, wall, res.message)
        return SolveOutcome(ERROR, message="limit reached without incumbent: " + res.message,
                            bound=bound, wall_time=wall)
    if res.status == 2:
        return SolveOutcome(INFEASIBLE, message=res.message, wall_time=wall)
    if res.status == 3:
        return SolveOutcome(UNBOUNDED, message=res.message, wall_time=wall)
    return SolveOutcome(ERROR, message=res.message, wall_time=wall)


def write_lp(model: LinearModel) -> str:
    """Render the model in CPLEX LP text format."""

    def name(j):
        return "".join(ch if ch.isalnum() or ch in "_." else "_" for ch in model.variables[j].name)

    def expr(coeffs):
        parts = []
        for j, a in sorted(coeffs.items()):
            if a:
                parts.append(f"{'-' if a < 0 else '+'} {abs(a):.12g} {name(j)}")
        return " ".join(parts) if parts else "0"

    lines = ["Maximize" if model.sense == "max" else "Minimize", f" obj: {expr(model.objective)}",
             "Subject To"]
    for r, con in enumerate(model.constraints):
        op = {"<=": "<=", ">=": ">=", "=": "="}[con.sense]
        cname = "".join(ch if ch.isalnum() or ch in "_." else "_" for ch in con.name) or f"c{r}"
        lines.append(f" {cname}: {expr(con.coeffs)} {op} {con.rhs:.12g}")
    lines.append("Bounds")
    for j, v in enumerate(model.variables):
        up = "+inf" if math.isinf(v.upper) else f"{v.upper:.12g}"
        lines.append(f" {v.lower:.12g} <= {name(j)} <= {up}")
    ints = [name(j) for j, v in enumerate(model.variables) if v.is_integer]
    if ints:
        lines.append("General")
        lines.append(" " + " ".join(ints))
    lines.append("End")
    return "\n".join(lines) + "\n"
