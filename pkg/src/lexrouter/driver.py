"""Column generation with exact closure, and the weighted / sequential pipelines."""
from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field
from fractions import Fraction

from . import lp
from .compact import build_compact, decode_compact
from .master import (ColumnPool, MasterState, Phase, closure_threshold,
                     solve_integer_restricted, solve_master_lp)
from .model import Column, Instance, LexSolution, ModelError, compute_big_m, make_column
from .pricing import PricingConfig, price_vehicle

log = logging.getLogger(__name__)

METHODS = ("compact-w", "compact-s", "cg-w", "cg-s")
BOUND_TOL = 1e-6


@dataclass(frozen=True)
class RunConfig:
    mode: str = "weighted"  # "weighted" | "sequential"
    formulation: str = "cg"  # "cg" | "compact"
    time_limit: float = 300.0
    eta: int = 20
    relaxation: bool = True
    initial_pool: str = "singletons"  # "singletons" | "empty"
    seed: int = 0
    label_cap: int = 1_000_000
    trace_bounds: bool = False  # also solve the integer master after every LP (diagnostic)

    def __post_init__(self):
        if self.time_limit <= 0:
            raise ValueError("time_limit must be positive")
        if self.eta < 1:
            raise ValueError("eta must be at least 1")
        if self.mode not in ("weighted", "sequential"):
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.formulation not in ("cg", "compact"):
            raise ValueError(f"unknown formulation {self.formulation!r}")
        if self.initial_pool not in ("singletons", "empty"):
            raise ValueError(f"unknown initial pool policy {self.initial_pool!r}")

    @classmethod
    def for_method(cls, method: str, **kw) -> "RunConfig":
        if method not in METHODS:
            raise ValueError(f"unknown method {method!r}; choose from {METHODS}")
        form, tag = method.split("-")
        return cls(mode="weighted" if tag == "w" else "sequential", formulation=form, **kw)


@dataclass
class PhaseStats:
    phase: str
    iterations: int = 0
    routes_generated: int = 0
    closure_routes: int = 0
    u_trajectory: list = field(default_factory=list)
    ell_trajectory: list = field(default_factory=list)
    level_trajectory: list = field(default_factory=list)
    ell_before_closure: Fraction | None = None
    ell: Fraction | None = None
    u: float | None = None
    converged: bool = False
    closure_complete: bool = False
    exact: bool = False
    bound_ok: bool = True
    wall: dict = field(default_factory=dict)

    def to_dict(self, timings: bool = False) -> dict:
        out = {
            "phase": self.phase,
            "iterations": self.iterations,
            "routes_generated": self.routes_generated,
            "closure_routes": self.closure_routes,
            "u": self.u,
            "u_trajectory": self.u_trajectory,
            "ell_trajectory": [float(x) for x in self.ell_trajectory],
            "level_trajectory": self.level_trajectory,
            "ell_before_closure": None if self.ell_before_closure is None
            else float(self.ell_before_closure),
            "ell": None if self.ell is None else float(self.ell),
            "converged": self.converged,
            "closure_complete": self.closure_complete,
            "exact": self.exact,
            "bound_ok": self.bound_ok,
        }
        if timings:
            out["wall"] = {k: round(v, 6) for k, v in self.wall.items()}
        return out


@dataclass
class RunStats:
    method: str = ""
    phases: list[PhaseStats] = field(default_factory=list)
    exact: bool = False
    wall_time: float = 0.0
    big_m: int | None = None
    d_star: int | None = None

    def to_dict(self, timings: bool = False) -> dict:
        out = {"method": self.method, "exact": self.exact, "big_m": self.big_m,
               "d_star": self.d_star, "phases": [p.to_dict(timings) for p in self.phases]}
        if timings:
            out["wall_time"] = round(self.wall_time, 6)
        return out


def initial_pool(inst: Instance, policy: str = "singletons") -> ColumnPool:
    """Single-intervention routes for up to 5 per vehicle (longest jobs first)."""
    pool = ColumnPool()
    if policy == "empty":
        return pool
    cands: list[Column] = []
    for v in range(len(inst.vehicles)):
        for i in inst.eligible_indices[v]:
            try:
                cands.append(make_column((i,), v, inst))
            except ModelError:
                continue
    cands.sort(key=lambda c: (-c.duration, c.vehicle, c.stops))
    pool.add_all(cands[:5 * len(inst.vehicles)])
    return pool


def _grace(config: RunConfig) -> float:
    return max(1.0, 0.05 * config.time_limit)


def _violates(u: float, ell) -> bool:
    """LP bound below the integer value beyond a relative tolerance."""
    return u + BOUND_TOL * max(1.0, abs(u)) < float(ell)


def _trace(pool, phase, inst, u, stats, deadline):
    limit = max(deadline - time.perf_counter(), 1.0)
    _, ell, _ = solve_integer_restricted(pool, phase, inst, limit)
    if ell is None:
        return
    stats.ell_trajectory.append(ell)
    if _violates(u, ell):
        stats.bound_ok = False


def solve_cg_phase(inst: Instance, phase: Phase, pool: ColumnPool, config: RunConfig,
                   deadline: float | None = None
                   ) -> tuple[MasterState, LexSolution, PhaseStats]:
    """One run of the exact column-generation algorithm for ``phase``.

    ``pool`` is extended in place.  With relaxation on, pricing starts with
    dominance condition 1 only and activates the next condition each time no
    improving route is found.
    """
    start = time.perf_counter()
    if deadline is None:
        deadline = start + config.time_limit
    stats = PhaseStats(phase.kind)
    state = MasterState(phase)
    size0 = len(pool)
    if not inst.interventions or not inst.vehicles:
        stats.converged = stats.closure_complete = stats.exact = True
        state.u, state.ell = 0.0, Fraction(0)
        stats.u, stats.ell = 0.0, Fraction(0)
        return state, LexSolution((), "optimal", True), stats

    soft_deadline = deadline - 0.1 * config.time_limit
    level = 1 if config.relaxation else 4
    need_lp = True
    u = duals = None
    t_lp = t_price = 0.0
    while True:
        if time.perf_counter() > soft_deadline:
            break
        if need_lp:
            t0 = time.perf_counter()
            u, duals, _ = solve_master_lp(pool, phase, inst)
            t_lp += time.perf_counter() - t0
            stats.iterations += 1
            stats.u_trajectory.append(u)
            need_lp = False
            if config.trace_bounds:
                _trace(pool, phase, inst, u, stats, deadline)
        stats.level_trajectory.append(level)
        t0 = time.perf_counter()
        found: list[Column] = []
        complete = True
        pc = PricingConfig(eta=config.eta, mode="improve", level=level,
                           label_cap=config.label_cap, deadline=soft_deadline)
        for v in range(len(inst.vehicles)):
            if time.perf_counter() > soft_deadline:
                complete = False
                break
            res = price_vehicle(inst, v, duals, phase, pc)
            found.extend(res.columns)
            complete = complete and res.complete
        t_price += time.perf_counter() - t0
        if pool.add_all(found):
            need_lp = True
            continue
        if not complete and time.perf_counter() > soft_deadline:
            break
        if level < 4:
            level += 1
            continue
        stats.converged = complete
        break
    if need_lp:
        # columns were added after the last LP; refresh the bound
        u, duals, _ = solve_master_lp(pool, phase, inst)
        stats.iterations += 1
        stats.u_trajectory.append(u)
    stats.wall["lp"] = t_lp
    stats.wall["pricing"] = t_price
    state.u, state.duals = u, duals
    stats.u = u

    t0 = time.perf_counter()
    limit = max(deadline - time.perf_counter(), _grace(config))
    sol, ell, out = solve_integer_restricted(pool, phase, inst, limit)
    stats.wall["integer"] = time.perf_counter() - t0
    state.ell = ell
    stats.ell_before_closure = ell
    if ell is not None and _violates(u, ell):
        stats.bound_ok = False

    closure_ok = False
    if stats.converged and ell is not None and out.status == lp.OPTIMAL:
        t0 = time.perf_counter()
        threshold = closure_threshold(state)
        closure_ok = True
        extra: list[Column] = []
        pc = PricingConfig(eta=None, mode="closure", threshold=threshold, level=4,
                           label_cap=config.label_cap, deadline=deadline)
        for v in range(len(inst.vehicles)):
            if time.perf_counter() > deadline:
                closure_ok = False
                break
            res = price_vehicle(inst, v, duals, phase, pc)
            extra.extend(res.columns)
            closure_ok = closure_ok and res.complete
        stats.closure_routes = pool.add_all(extra)
        stats.wall["closure"] = time.perf_counter() - t0
        if stats.closure_routes:
            t0 = time.perf_counter()
            limit = max(deadline - time.perf_counter(), _grace(config))
            sol2, ell2, out2 = solve_integer_restricted(pool, phase, inst, limit)
            stats.wall["integer"] += time.perf_counter() - t0
            if ell2 is not None and ell2 >= ell:
                sol, ell, out = sol2, ell2, out2
            else:
                closure_ok = False
            state.ell = ell
    stats.closure_complete = closure_ok
    stats.ell = ell
    if ell is not None and _violates(u, ell):
        stats.bound_ok = False
    stats.routes_generated = len(pool) - size0
    stats.exact = bool(stats.converged and closure_ok and out.status == lp.OPTIMAL)
    sol.exact = stats.exact
    return state, sol, stats


def _finish(sol: LexSolution, stats: RunStats, start: float) -> tuple[LexSolution, RunStats]:
    stats.wall_time = time.perf_counter() - start
    stats.exact = bool(stats.phases) and all(p.exact for p in stats.phases)
    sol.exact = stats.exact
    sol.stats = stats.to_dict()
    return sol, stats


def _compact_phase(inst: Instance, mode: str, limit: float, **kw) -> tuple[LexSolution, PhaseStats]:
    t0 = time.perf_counter()
    handle = build_compact(inst, mode, **kw)
    out = lp.solve_milp(handle.model, limit)
    ps = PhaseStats(mode)
    ps.wall["integer"] = time.perf_counter() - t0
    if not out.has_solution:
        return LexSolution((), status=out.status, exact=False), ps
    sol = decode_compact(out, handle, inst)
    ps.exact = out.status == lp.OPTIMAL
    ps.converged = ps.closure_complete = ps.exact
    ps.ell = {"weighted": Fraction(kw.get("big_m") or 0) * sol.f1 - sol.f2,
              "duration": Fraction(sol.f1), "cost": -sol.f2}[mode]
    ps.u = out.bound
    return sol, ps


def solve_weighted(inst: Instance, config: RunConfig = RunConfig()) -> tuple[LexSolution, RunStats]:
    """Single run maximising ``M * f1 - f2``."""
    start = time.perf_counter()
    deadline = start + config.time_limit
    stats = RunStats(method=("cg" if config.formulation == "cg" else "compact") + "-w")
    if not inst.interventions:
        stats.phases.append(PhaseStats("weighted", converged=True, closure_complete=True,
                                       exact=True))
        return _finish(LexSolution(), stats, start)
    big_m = compute_big_m(inst).value
    stats.big_m = big_m
    if config.formulation == "compact":
        sol, ps = _compact_phase(inst, "weighted", config.time_limit, big_m=big_m)
    else:
        pool = initial_pool(inst, config.initial_pool)
        _, sol, ps = solve_cg_phase(inst, Phase.weighted(big_m), pool, config, deadline)
    stats.phases.append(ps)
    return _finish(sol, stats, start)


def solve_sequential(inst: Instance, config: RunConfig = RunConfig()
                     ) -> tuple[LexSolution, RunStats]:
    """Maximise duration, then minimise cost keeping the duration reached.

    Half of the budget goes to the first phase; time it leaves unused
    carries over to the second.
    """
    start = time.perf_counter()
    deadline = start + config.time_limit
    stats = RunStats(method=("cg" if config.formulation == "cg" else "compact") + "-s")
    if not inst.interventions:
        for kind in ("duration", "cost"):
            stats.phases.append(PhaseStats(kind, converged=True, closure_complete=True,
                                           exact=True))
        stats.d_star = 0
        return _finish(LexSolution(), stats, start)
    first_deadline = start + config.time_limit / 2
    if config.formulation == "compact":
        sol1, ps1 = _compact_phase(inst, "duration", config.time_limit / 2)
    else:
        pool = initial_pool(inst, config.initial_pool)
        _, sol1, ps1 = solve_cg_phase(inst, Phase.duration(), pool, config, first_deadline)
    stats.phases.append(ps1)
    d_star = sol1.f1
    stats.d_star = d_star
    remaining = max(deadline - time.perf_counter(), _grace(config))
    if config.formulation == "compact":
        sol2, ps2 = _compact_phase(inst, "cost", remaining, min_duration=d_star)
    else:
        pool.add_all(sol1.routes)
        _, sol2, ps2 = solve_cg_phase(inst, Phase.cost(d_star), pool, config,
                                      time.perf_counter() + remaining)
    stats.phases.append(ps2)
    if not sol2.routes and d_star > 0:
        log.warning("second phase produced no incumbent; keeping the first-phase solution")
        sol2 = sol1
        ps2.exact = False
    if sol2.f1 < d_star:
        raise AssertionError(f"second phase lost duration: {sol2.f1} < {d_star}")
    return _finish(sol2, stats, start)


def solve(inst: Instance, method: str, **overrides) -> tuple[LexSolution, RunStats]:
    """Run one of ``compact-w``, ``compact-s``, ``cg-w`` or ``cg-s``."""
    config = RunConfig.for_method(method, **overrides)
    if config.mode == "weighted":
        return solve_weighted(inst, config)
    return solve_sequential(inst, config)
