"""Restricted master problem over route columns.

Every phase is posed as a maximisation so that "improving" always means a
positive reduced cost:

* ``weighted``  maximise  sum (M*D_r - c_r) lambda_r
* ``duration``  maximise  sum D_r lambda_r
* ``cost``      maximise -sum c_r lambda_r  s.t. sum D_r lambda_r >= d*
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Iterator

from . import lp
from .model import Column, Instance, LexSolution, columns_from


@dataclass(frozen=True)
class Phase:
    kind: str
    big_m: int | None = None
    min_duration: int | None = None

    @classmethod
    def weighted(cls, big_m: int) -> "Phase":
        return cls("weighted", big_m=big_m)

    @classmethod
    def duration(cls) -> "Phase":
        return cls("duration")

    @classmethod
    def cost(cls, min_duration: int) -> "Phase":
        return cls("cost", min_duration=min_duration)

    def __post_init__(self):
        if self.kind == "weighted" and self.big_m is None:
            raise ValueError("weighted phase needs big_m")
        if self.kind == "cost" and self.min_duration is None:
            raise ValueError("cost phase needs min_duration")
        if self.kind not in ("weighted", "duration", "cost"):
            raise ValueError(f"unknown phase {self.kind!r}")

    def weights(self, duals: "DualValues") -> tuple[float, float]:
        """(weight on duration, weight on cost) in the reduced cost."""
        if self.kind == "weighted":
            return float(self.big_m), 1.0
        if self.kind == "duration":
            return 1.0, 0.0
        return duals.rho, 1.0

    def value(self, f1: int, f2: Fraction) -> Fraction:
        """Exact phase objective of a solution."""
        if self.kind == "weighted":
            return self.big_m * f1 - f2
        if self.kind == "duration":
            return Fraction(f1)
        return -f2

    def column_value(self, col: Column) -> float:
        return float(self.value(col.duration, col.cost))


@dataclass(frozen=True)
class DualValues:
    nu: tuple[float, ...]
    mu: tuple[float, ...]
    rho: float = 0.0

    @classmethod
    def zeros(cls, inst: Instance) -> "DualValues":
        return cls((0.0,) * len(inst.interventions), (0.0,) * len(inst.vehicles))


class ColumnPool:
    """Insertion-ordered set of columns keyed by (vehicle, stop sequence)."""

    def __init__(self, columns: Iterable[Column] = ()):
        self._cols: list[Column] = []
        self._keys: set = set()
        self.add_all(columns)

    def add(self, col: Column) -> bool:
        if col.key in self._keys:
            return False
        self._keys.add(col.key)
        self._cols.append(col)
        return True

    def add_all(self, cols: Iterable[Column]) -> int:
        return sum(self.add(c) for c in cols)

    def __contains__(self, col: Column) -> bool:
        return col.key in self._keys

    def __len__(self) -> int:
        return len(self._cols)

    def __iter__(self) -> Iterator[Column]:
        return iter(self._cols)

    def __getitem__(self, i: int) -> Column:
        return self._cols[i]

    def copy(self) -> "ColumnPool":
        return ColumnPool(self._cols)


def build_master_lp(pool: ColumnPool, phase: Phase, inst: Instance, integer: bool = False
                    ) -> lp.LinearModel:
    """Set-packing model over the pool.

    Row order: one coverage row per intervention, one convexity row per
    vehicle, then (cost phase only) the minimum-duration row.
    """
    model = lp.LinearModel("max")
    cover = [dict() for _ in inst.interventions]
    conv = [dict() for _ in inst.vehicles]
    dur = {}
    for r, col in enumerate(pool):
        j = model.add_var(f"lam_{r}", 0.0, 1.0 if integer else float("inf"), integer,
                          phase.column_value(col))
        for i in col.coverage:
            cover[i][j] = 1.0
        conv[col.vehicle][j] = 1.0
        dur[j] = float(col.duration)
    for i, row in enumerate(cover):
        model.add_constraint(f"cover_{inst.interventions[i].id}", row, "<=", 1.0)
    for k, row in enumerate(conv):
        model.add_constraint(f"vehicle_{inst.vehicles[k].id}", row, "<=", 1.0)
    if phase.kind == "cost":
        model.add_constraint("min_duration", dur, ">=", float(phase.min_duration))
    return model


@dataclass
class MasterState:
    phase: Phase
    u: float | None = None
    ell: Fraction | None = None
    duals: DualValues | None = None
    history: list = field(default_factory=list)


def solve_master_lp(pool: ColumnPool, phase: Phase, inst: Instance
                    ) -> tuple[float, DualValues, lp.SolveOutcome]:
    """LP optimum of the restricted master and its duals."""
    model = build_master_lp(pool, phase, inst)
    out = lp.solve_lp(model)
    if out.status != lp.OPTIMAL:
        raise RuntimeError(f"restricted master LP not optimal: {out.status} {out.message}")
    n, m = len(inst.interventions), len(inst.vehicles)
    y = out.duals
    rho = -float(y[n + m]) if phase.kind == "cost" else 0.0
    duals = DualValues(tuple(float(v) for v in y[:n]), tuple(float(v) for v in y[n:n + m]), rho)
    return out.objective, duals, out


def reduced_cost(col: Column, duals: DualValues, phase: Phase) -> float:
    w_d, w_c = phase.weights(duals)
    return (w_d * col.duration - w_c * float(col.cost) - duals.mu[col.vehicle]
            - sum(duals.nu[i] for i in col.coverage))


def reduced_cost_exact(col: Column, duals: DualValues, phase: Phase) -> Fraction:
    """Reduced cost in rational arithmetic (duals taken as their exact binary values)."""
    if phase.kind == "weighted":
        w_d, w_c = Fraction(phase.big_m), 1
    elif phase.kind == "duration":
        w_d, w_c = Fraction(1), 0
    else:
        w_d, w_c = Fraction(duals.rho), 1
    return (w_d * col.duration - w_c * col.cost - Fraction(duals.mu[col.vehicle])
            - sum((Fraction(duals.nu[i]) for i in col.coverage), Fraction(0)))


def solve_integer_restricted(pool: ColumnPool, phase: Phase, inst: Instance,
                             time_limit: float | None = None
                             ) -> tuple[LexSolution, Fraction | None, lp.SolveOutcome]:
    """Binary restricted master; returns the decoded solution and its exact value."""
    model = build_master_lp(pool, phase, inst, integer=True)
    out = lp.solve_milp(model, time_limit)
    if not out.has_solution:
        return LexSolution((), status=out.status, exact=False), None, out
    chosen = [pool[r] for r, x in enumerate(out.x) if x > 0.5]
    sol = LexSolution(columns_from(chosen), status=out.status, exact=out.status == lp.OPTIMAL)
    return sol, phase.value(sol.f1, sol.f2), out


def closure_threshold(state: MasterState) -> float:
    """Reduced-cost level below which no column can improve the integer optimum."""
    if state.u is None or state.ell is None:
        raise ValueError("closure threshold needs both the LP value and the integer value")
    return float(state.ell) - state.u
