"""Arc-based compact MILP in weighted, duration and cost variants."""
from __future__ import annotations

from dataclasses import dataclass, field

from . import lp
from .model import Instance, LexSolution, LONG_THRESHOLD, columns_from, make_column, ModelError

DEPOT = -1


class DecodeError(RuntimeError):
    pass


@dataclass
class CompactModelHandle:
    model: lp.LinearModel
    mode: str
    x: dict[tuple[int, int, int], int] = field(default_factory=dict)  # (i, j, v) -> var
    u: dict[int, int] = field(default_factory=dict)
    z: dict[int, int] = field(default_factory=dict)
    rows: dict[str, list[int]] = field(default_factory=dict)
    big_m: int | None = None
    min_duration: int | None = None


def build_compact(inst: Instance, mode: str, big_m: int | None = None,
                  min_duration: int | None = None) -> CompactModelHandle:
    """Compact model; ``mode`` is ``weighted`` (needs ``big_m``), ``duration``,
    or ``cost`` (needs ``min_duration``).  All variants maximise; the cost
    variant maximises the negated cost.

    Depot nodes are keyed ``-1`` in ``handle.x``: arc ``(DEPOT, i, v)`` leaves
    the depot of vehicle ``v``.
    """
    if mode == "weighted" and big_m is None:
        raise ValueError("weighted compact model needs big_m")
    if mode == "cost" and min_duration is None:
        raise ValueError("cost compact model needs min_duration")
    if mode not in ("weighted", "duration", "cost"):
        raise ValueError(f"unknown mode {mode!r}")
    m = lp.LinearModel("max")
    h = CompactModelHandle(m, mode, big_m=big_m, min_duration=min_duration)
    itvs = inst.interventions
    t = inst.travel_time
    cost = inst.arc_cost
    md, ed = inst.md, inst.ed

    def row(cls, name, coeffs, sense, rhs):
        h.rows.setdefault(cls, []).append(m.add_constraint(name, coeffs, sense, rhs))

    for i, it in enumerate(itvs):
        h.u[i] = m.add_var(f"u_{it.id}", float(it.window_start),
                           float(it.window_end - it.duration))  # windows
        if it.duration < LONG_THRESHOLD:
            h.z[i] = m.add_var(f"z_{it.id}", 0.0, 1.0, integer=True)

    duration_terms: dict[int, float] = {}
    for v, veh in enumerate(inst.vehicles):
        nodes = [DEPOT, *inst.eligible_indices[v]]
        pos = {DEPOT: veh.depot, **{i: itvs[i].node for i in nodes[1:]}}
        for a in nodes:
            for b in nodes:
                if a == b:
                    continue
                j = m.add_var(f"x_{a}_{b}_{veh.id}", 0.0, 1.0, integer=True)
                h.x[(a, b, v)] = j
                arc = float(cost[pos[a]][pos[b]])
                if a == DEPOT:
                    arc += float(veh.cost)
                if a != DEPOT:
                    duration_terms[j] = float(itvs[a].duration)
                if mode == "weighted":
                    m.objective[j] = big_m * duration_terms.get(j, 0.0) - arc
                elif mode == "duration":
                    if j in duration_terms:
                        m.objective[j] = duration_terms[j]
                else:
                    m.objective[j] = -arc

    x = h.x
    vehicles_of = {i: [] for i in range(len(itvs))}
    for v in range(len(inst.vehicles)):
        for i in inst.eligible_indices[v]:
            vehicles_of[i].append(v)

    # each intervention at most once
    for i, it in enumerate(itvs):
        coeffs = {j: 1.0 for (a, b, v), j in x.items() if a == i}
        row("coverage", f"cover_{it.id}", coeffs, "<=", 1.0)
    # flow conservation and single depot departure
    for v, veh in enumerate(inst.vehicles):
        nodes = [DEPOT, *inst.eligible_indices[v]]
        for a in nodes:
            coeffs = {}
            for b in nodes:
                if a != b:
                    coeffs[x[(a, b, v)]] = coeffs.get(x[(a, b, v)], 0.0) + 1.0
                    coeffs[x[(b, a, v)]] = coeffs.get(x[(b, a, v)], 0.0) - 1.0
            row("flow", f"flow_{a}_{veh.id}", coeffs, "=", 0.0)
        row("departure", f"depart_{veh.id}",
            {x[(DEPOT, b, v)]: 1.0 for b in nodes if b != DEPOT}, "<=", 1.0)
    # time chaining between interventions
    for i, a in enumerate(itvs):
        for j, b in enumerate(itvs):
            if i == j:
                continue
            shared = [v for v in vehicles_of[i] if v in vehicles_of[j]]
            if not shared:
                continue
            big = float(a.window_end + a.duration + t[a.node][b.node])
            coeffs = {h.u[i]: 1.0, h.u[j]: -1.0}
            for v in shared:
                coeffs[x[(i, j, v)]] = big
            row("chaining", f"chain_{a.id}_{b.id}", coeffs, "<=", float(a.window_end))
    # first arc from the depot, return before day end
    for v, veh in enumerate(inst.vehicles):
        for i in inst.eligible_indices[v]:
            it = itvs[i]
            row("first_arc", f"first_{it.id}_{veh.id}",
                {x[(DEPOT, i, v)]: float(t[veh.depot][it.node]), h.u[i]: -1.0}, "<=", 0.0)
            row("day_end", f"end_{it.id}_{veh.id}",
                {h.u[i]: 1.0, x[(i, DEPOT, v)]: float(t[it.node][veh.depot])}, "<=",
                float(ed - it.duration))
    # half-day rule for short interventions
    for i, zi in h.z.items():
        it = itvs[i]
        row("half_day", f"halfday_end_{it.id}", {h.u[i]: 1.0, zi: -float(ed - md)}, "<=",
            float(md - it.duration))
        row("half_day", f"halfday_start_{it.id}", {h.u[i]: 1.0, zi: -float(md)}, ">=", 0.0)
    # resource capacity per vehicle and interval
    for v, veh in enumerate(inst.vehicles):
        for k, iv in enumerate(inst.intervals):
            coeffs = {}
            for (a, b, w), j in x.items():
                if w == v and a != DEPOT and itvs[a].resource_use[k]:
                    coeffs[j] = float(itvs[a].resource_use[k])
            if coeffs:
                row("resource", f"res_{veh.id}_{iv.id}", coeffs, "<=", float(veh.capacity[k]))
    if mode == "cost":
        row("min_duration", "min_duration", duration_terms, ">=", float(min_duration))
    return h


def decode_compact(outcome: lp.SolveOutcome, handle: CompactModelHandle, inst: Instance,
                   tol: float = 1e-6) -> LexSolution:
    """Routes from the arc variables; objectives are recomputed from the routes."""
    if not outcome.has_solution:
        raise DecodeError(f"no solution to decode (status {outcome.status})")
    xv = outcome.x
    succ: dict[tuple[int, int], int] = {}
    for (a, b, v), j in handle.x.items():
        val = xv[j]
        if abs(val - round(val)) > tol:
            raise DecodeError(f"fractional arc value {val} on {(a, b, v)}")
        if round(val) == 1:
            if (a, v) in succ:
                raise DecodeError(f"two arcs leave node {a} for vehicle {v}")
            succ[(a, v)] = b
    routes = []
    seen = set()
    for v in range(len(inst.vehicles)):
        if (DEPOT, v) not in succ:
            continue
        stops = []
        node = succ[(DEPOT, v)]
        while node != DEPOT:
            if node in stops:
                raise DecodeError(f"cycle on vehicle {inst.vehicles[v].id}")
            stops.append(node)
            node = succ.get((node, v))
            if node is None:
                raise DecodeError(f"route of vehicle {inst.vehicles[v].id} does not close")
        try:
            routes.append(make_column(stops, v, inst))
        except ModelError as exc:
            raise DecodeError(str(exc)) from None
        seen.update((i, v) for i in stops)
    # arcs not reachable from a depot would form a subtour
    for (a, v) in succ:
        if a != DEPOT and (a, v) not in seen:
            raise DecodeError(f"subtour through {inst.interventions[a].id}")
    return LexSolution(columns_from(routes), status=outcome.status,
                       exact=outcome.status == lp.OPTIMAL)
