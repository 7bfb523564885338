"""Brute-force lexicographic optimum for tiny instances.

Routes are enumerated depth-first with the pricing extension rules (zero
duals, no dominance), then every combination of at most one route per
vehicle with disjoint coverage is scored.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .master import DualValues, Phase
from .model import Column, Instance, LexSolution, columns_from, make_column
from .pricing import DEPOT, Pricer


class BudgetExceeded(RuntimeError):
    pass


@dataclass(frozen=True)
class EnumerationBudget:
    max_interventions: int = 8
    max_vehicles: int = 3
    max_routes: int = 200_000

    def __post_init__(self):
        if min(self.max_interventions, self.max_vehicles, self.max_routes) < 1:
            raise ValueError("budgets must be positive")


def _check(inst: Instance, budget: EnumerationBudget):
    if len(inst.interventions) > budget.max_interventions:
        raise BudgetExceeded(f"{len(inst.interventions)} interventions > "
                             f"{budget.max_interventions}")
    if len(inst.vehicles) > budget.max_vehicles:
        raise BudgetExceeded(f"{len(inst.vehicles)} vehicles > {budget.max_vehicles}")


def enumerate_routes(inst: Instance, vehicle: int,
                     budget: EnumerationBudget = EnumerationBudget()) -> list[Column]:
    """Every feasible elementary non-empty route of ``vehicle``."""
    _check(inst, budget)
    pricer = Pricer(inst, vehicle, DualValues.zeros(inst), Phase.duration())
    out: list[Column] = []

    def dfs(label):
        for j in pricer.eligible:
            child = pricer.extend(label, j)
            if child is None:
                continue
            if pricer.extend(child, DEPOT) is not None:
                out.append(make_column(child.path, vehicle, inst))
                if len(out) > budget.max_routes:
                    raise BudgetExceeded(f"more than {budget.max_routes} routes")
            dfs(child)

    dfs(pricer.initial_label())
    return out


def _rank(f1: int, f2: Fraction, keys: tuple):
    return (-f1, f2, keys)


def brute_force_lex_optimum(inst: Instance,
                            budget: EnumerationBudget = EnumerationBudget()) -> LexSolution:
    """Lexicographic optimum: max total duration, then min cost.

    Ties are broken by the smallest tuple of (vehicle, stops) route keys.
    For each vehicle and covered set only the cheapest route (smallest key
    among equals) can appear in the optimum, so combinations range over those.
    """
    _check(inst, budget)
    per_vehicle: list[list[Column]] = []
    for v in range(len(inst.vehicles)):
        best: dict[frozenset, Column] = {}
        for col in enumerate_routes(inst, v, budget):
            cur = best.get(col.coverage)
            if cur is None or (col.cost, col.stops) < (cur.cost, cur.stops):
                best[col.coverage] = col
        per_vehicle.append(sorted(best.values(), key=lambda c: c.key))

    best_key = None
    best_sel: tuple[Column, ...] = ()

    def rec(v, used, chosen, f1, f2):
        nonlocal best_key, best_sel
        if v == len(per_vehicle):
            key = _rank(f1, f2, tuple(c.key for c in chosen))
            if best_key is None or key < best_key:
                best_key, best_sel = key, tuple(chosen)
            return
        rec(v + 1, used, chosen, f1, f2)
        for col in per_vehicle[v]:
            if used & col.coverage:
                continue
            chosen.append(col)
            rec(v + 1, used | col.coverage, chosen, f1 + col.duration, f2 + col.cost)
            chosen.pop()

    rec(0, frozenset(), [], 0, Fraction(0))
    sol = LexSolution(columns_from(best_sel), status="optimal", exact=True)
    if not exchange_stable(sol, per_vehicle):
        raise AssertionError("oracle optimum failed its exchange self-check")
    return sol


def exchange_stable(sol: LexSolution, per_vehicle: list[list[Column]]) -> bool:
    """No single route removal, addition or replacement improves (f1, -f2)."""
    base = (-sol.f1, sol.f2)
    by_vehicle = {c.vehicle: c for c in sol.routes}
    for v, cands in enumerate(per_vehicle):
        others = [c for c in sol.routes if c.vehicle != v]
        covered = frozenset().union(*(c.coverage for c in others)) if others else frozenset()
        f1o = sum(c.duration for c in others)
        f2o = sum((c.cost for c in others), Fraction(0))
        if v in by_vehicle and (-f1o, f2o) < base:
            return False
        for col in cands:
            if col.coverage & covered:
                continue
            if (-(f1o + col.duration), f2o + col.cost) < base:
                return False
    return True
