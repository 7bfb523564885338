"""Problem data, route metrics and schedule validation.

All times are integer minutes measured from the start of the work day.
Distances, costs and the per-km rate are kept as :class:`fractions.Fraction`
so that objective values compare exactly.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

LONG_THRESHOLD = 120


class ModelError(ValueError):
    """Raised for inconsistent problem data."""


class EligibilityError(ModelError):
    """A route visits a node the vehicle may not serve."""


@dataclass(frozen=True)
class Interval:
    id: str
    start: int
    end: int


@dataclass(frozen=True)
class Intervention:
    """A job at ``node``; ``resource_use`` is aligned with ``Instance.intervals``."""

    id: str
    node: int
    duration: int
    window_start: int
    window_end: int
    resource_use: tuple[int, ...] = ()

    @property
    def is_long(self) -> bool:
        return is_long(self)


@dataclass(frozen=True)
class Vehicle:
    """A technician team. ``capacity`` is aligned with ``Instance.intervals``."""

    id: str
    depot: int
    cost: Fraction
    capacity: tuple[int, ...]
    eligible: frozenset[str]


@dataclass(frozen=True)
class Node:
    id: str
    kind: str  # "depot" | "intervention"


@dataclass(frozen=True, eq=False)
class Instance:
    nodes: tuple[Node, ...]
    interventions: tuple[Intervention, ...]
    vehicles: tuple[Vehicle, ...]
    travel_time: tuple[tuple[int, ...], ...]
    travel_dist: tuple[tuple[Fraction, ...], ...]
    md: int
    ed: int
    delta: Fraction
    intervals: tuple[Interval, ...] = ()
    name: str = ""
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        check_instance(self)

    @cached_property
    def intervention_index(self) -> dict[str, int]:
        return {itv.id: i for i, itv in enumerate(self.interventions)}

    @cached_property
    def vehicle_index(self) -> dict[str, int]:
        return {v.id: k for k, v in enumerate(self.vehicles)}

    @cached_property
    def eligible_indices(self) -> tuple[tuple[int, ...], ...]:
        """Per vehicle, sorted intervention indices it may serve (the set I_v)."""
        idx = self.intervention_index
        return tuple(tuple(sorted(idx[i] for i in v.eligible)) for v in self.vehicles)

    @cached_property
    def arc_cost(self) -> tuple[tuple[Fraction, ...], ...]:
        """Distance cost delta * l_ij between nodes."""
        return tuple(tuple(self.delta * d for d in row) for row in self.travel_dist)

    def __eq__(self, other):
        if not isinstance(other, Instance):
            return NotImplemented
        return (self.nodes, self.interventions, self.vehicles, self.travel_time,
                self.travel_dist, self.md, self.ed, self.delta, self.intervals) == (
                other.nodes, other.interventions, other.vehicles, other.travel_time,
                other.travel_dist, other.md, other.ed, other.delta, other.intervals)

    __hash__ = object.__hash__


def check_instance(inst: Instance) -> None:
    """Validate every data invariant; raise :class:`ModelError` naming the path."""
    n = len(inst.nodes)
    if not 0 < inst.md < inst.ed:
        raise ModelError("day: need 0 < md < ed")
    if inst.delta < 0:
        raise ModelError("day.delta: must be non-negative")
    nk = len(inst.intervals)
    for k, iv in enumerate(inst.intervals):
        if not 0 <= iv.start < iv.end:
            raise ModelError(f"intervals[{k}]: need 0 <= start < end")
    if len(inst.travel_time) != n or any(len(r) != n for r in inst.travel_time):
        raise ModelError("travel.time: not a square matrix over nodes")
    if len(inst.travel_dist) != n or any(len(r) != n for r in inst.travel_dist):
        raise ModelError("travel.dist: not a square matrix over nodes")
    t, l = inst.travel_time, inst.travel_dist
    for i in range(n):
        if t[i][i] != 0 or l[i][i] != 0:
            raise ModelError(f"travel[{i}][{i}]: diagonal must be zero")
        for j in range(n):
            if t[i][j] < 0 or l[i][j] < 0:
                raise ModelError(f"travel[{i}][{j}]: negative entry")
            if t[i][j] == 0 and l[i][j] > 0:
                raise ModelError(f"travel[{i}][{j}]: positive distance with zero time")
    tt = np.asarray(t, dtype=np.int64).reshape(n, n)
    for h in range(n):
        bad = tt > tt[:, h:h + 1] + tt[h:h + 1, :]
        if bad.any():
            i, j = map(int, np.argwhere(bad)[0])
            raise ModelError(f"travel.time: triangle inequality violated for ({i},{h},{j})")

    seen_nodes = set()
    ids = set()
    for idx, itv in enumerate(inst.interventions):
        path = f"interventions[{idx}]"
        if itv.id in ids:
            raise ModelError(f"{path}.id: duplicate id {itv.id!r}")
        ids.add(itv.id)
        if not 0 <= itv.node < n or inst.nodes[itv.node].kind != "intervention":
            raise ModelError(f"{path}.node: must reference an intervention node")
        if itv.node in seen_nodes:
            raise ModelError(f"{path}.node: node shared by two interventions")
        seen_nodes.add(itv.node)
        if itv.duration < 1:
            raise ModelError(f"{path}.d: duration must be >= 1")
        if itv.window_start < 0 or itv.window_start + itv.duration > itv.window_end:
            raise ModelError(f"{path}.window: window does not admit the intervention")
        if itv.window_end > inst.ed:
            raise ModelError(f"{path}.window: window ends after ed")
        if not itv.is_long and half_day_start(itv.window_start, itv, inst.md) is None:
            raise ModelError(f"{path}.window: short intervention fits no half-day")
        if len(itv.resource_use) != nk:
            raise ModelError(f"{path}.q: expected {nk} interval entries")
        for k, q in enumerate(itv.resource_use):
            if q < 0:
                raise ModelError(f"{path}.q: negative consumption")
            iv = inst.intervals[k]
            if q > 0 and not (iv.start <= itv.window_start and itv.window_end <= iv.end):
                raise ModelError(
                    f"{path}.q: consumption on interval {iv.id!r} not containing the window")
    vids = set()
    for idx, v in enumerate(inst.vehicles):
        path = f"vehicles[{idx}]"
        if v.id in vids:
            raise ModelError(f"{path}.id: duplicate id {v.id!r}")
        vids.add(v.id)
        if not 0 <= v.depot < n or inst.nodes[v.depot].kind != "depot":
            raise ModelError(f"{path}.depot_node: must reference a depot node")
        if v.cost < 0:
            raise ModelError(f"{path}.g: negative cost")
        if len(v.capacity) != nk or any(m < 0 for m in v.capacity):
            raise ModelError(f"{path}.m: expected {nk} non-negative capacities")
        unknown = v.eligible - ids
        if unknown:
            raise ModelError(f"{path}.eligible: unknown interventions {sorted(unknown)}")


def is_long(intervention: Intervention) -> bool:
    """True when the intervention may be interrupted by the lunch instant."""
    return intervention.duration >= LONG_THRESHOLD


def half_day_start(arrival: int, itv: Intervention, md: int) -> int | None:
    """Earliest start not before ``arrival`` that respects the window and,
    for short interventions, keeps the job inside one half-day.

    Returns ``None`` when no such start exists.
    """
    start = max(arrival, itv.window_start)
    if itv.duration < LONG_THRESHOLD and start < md < start + itv.duration:
        start = md
    if start + itv.duration > itv.window_end:
        return None
    return start


@dataclass(frozen=True)
class BigM:
    value: int
    bracket: Fraction
    gcd: int
    exact: Fraction


def compute_big_m(inst: Instance) -> BigM:
    """Weight that makes ``M * f1 - f2`` rank solutions lexicographically.

    Node pairs with zero travel time are left out of the distance/time ratio.
    A non-integral value is rounded up.
    """
    if not inst.interventions:
        raise ModelError("big-M needs at least one intervention")
    n = len(inst.nodes)
    ratio = Fraction(0)
    for i in range(n):
        for j in range(n):
            if i != j and inst.travel_time[i][j] > 0:
                r = Fraction(inst.travel_dist[i][j]) / inst.travel_time[i][j]
                ratio = max(ratio, r)
    min_d = min(itv.duration for itv in inst.interventions)
    costs = [v.cost for v in inst.vehicles]
    personnel = sum(costs, Fraction(0)) - min(costs) if costs else Fraction(0)
    bracket = len(inst.vehicles) * (inst.ed - min_d) * ratio * inst.delta + personnel
    g = math.gcd(*(itv.duration for itv in inst.interventions))
    exact = bracket / g + 1
    return BigM(value=math.ceil(exact), bracket=bracket, gcd=g, exact=exact)


@dataclass(frozen=True)
class Column:
    """One vehicle route: depot, ``stops`` (intervention indices), depot."""

    vehicle: int
    stops: tuple[int, ...]
    starts: tuple[int, ...]
    duration: int
    cost: Fraction
    coverage: frozenset[int]

    def node_sequence(self, inst: Instance) -> tuple[int, ...]:
        depot = inst.vehicles[self.vehicle].depot
        return (depot, *(inst.interventions[i].node for i in self.stops), depot)

    @property
    def key(self) -> tuple[int, tuple[int, ...]]:
        return (self.vehicle, self.stops)

    def timeline(self, inst: Instance) -> list[dict]:
        """Per-stop node, arrival, start and end minutes, depots included."""
        v = inst.vehicles[self.vehicle]
        t = inst.travel_time
        rows = [{"node": inst.nodes[v.depot].id, "arrival": 0, "start": 0, "end": 0}]
        prev, ready = v.depot, 0
        for i, u in zip(self.stops, self.starts):
            itv = inst.interventions[i]
            rows.append({"node": inst.nodes[itv.node].id, "arrival": ready + t[prev][itv.node],
                         "start": u, "end": u + itv.duration})
            prev, ready = itv.node, u + itv.duration
        back = ready + t[prev][v.depot]
        rows.append({"node": inst.nodes[v.depot].id, "arrival": back, "start": back, "end": back})
        return rows


def route_metrics(stops: Sequence[int], vehicle: int, inst: Instance
                  ) -> tuple[int, Fraction, frozenset[int]]:
    """Total duration, cost and coverage of the route depot -> stops -> depot."""
    v = inst.vehicles[vehicle]
    allowed = inst.eligible_indices[vehicle]
    prev = v.depot
    dur = 0
    cost = v.cost
    for i in stops:
        if i not in allowed:
            raise EligibilityError(
                f"intervention {inst.interventions[i].id!r} not eligible for vehicle {v.id!r}")
        node = inst.interventions[i].node
        cost += inst.arc_cost[prev][node]
        dur += inst.interventions[i].duration
        prev = node
    cost += inst.arc_cost[prev][v.depot]
    return dur, cost, frozenset(stops)


def earliest_schedule(stops: Sequence[int], vehicle: int, inst: Instance) -> tuple[int, ...] | None:
    """Canonical (earliest) start times, or ``None`` if the route is infeasible."""
    v = inst.vehicles[vehicle]
    t = inst.travel_time
    used = [0] * len(inst.intervals)
    prev, ready = v.depot, 0
    starts = []
    for i in stops:
        itv = inst.interventions[i]
        start = half_day_start(ready + t[prev][itv.node], itv, inst.md)
        if start is None:
            return None
        for k, q in enumerate(itv.resource_use):
            used[k] += q
            if used[k] > v.capacity[k]:
                return None
        starts.append(start)
        prev, ready = itv.node, start + itv.duration
    if ready + t[prev][v.depot] > inst.ed:
        return None
    return tuple(starts)


def make_column(stops: Sequence[int], vehicle: int, inst: Instance) -> Column:
    """Build a column with canonical start times; raise if infeasible."""
    stops = tuple(stops)
    if len(set(stops)) != len(stops):
        raise ModelError("route visits an intervention twice")
    dur, cost, cov = route_metrics(stops, vehicle, inst)
    starts = earliest_schedule(stops, vehicle, inst)
    if starts is None:
        raise ModelError(f"infeasible route {stops} for vehicle {inst.vehicles[vehicle].id!r}")
    return Column(vehicle, stops, starts, dur, cost, cov)


@dataclass
class LexSolution:
    """Selected routes (at most one per vehicle) plus run metadata."""

    routes: tuple[Column, ...] = ()
    status: str = "optimal"
    exact: bool = True
    stats: dict = field(default_factory=dict)

    @property
    def f1(self) -> int:
        return sum(c.duration for c in self.routes)

    @property
    def f2(self) -> Fraction:
        return sum((c.cost for c in self.routes), Fraction(0))

    @property
    def objectives(self) -> tuple[int, Fraction]:
        return self.f1, self.f2


@dataclass(frozen=True)
class Violation:
    kind: str
    ids: tuple[str, ...]
    detail: str = ""


def validate_schedule(solution: LexSolution, inst: Instance) -> list[Violation]:
    """Check a solution against every constraint class of the compact model.

    Works directly from the stored sequences and start times; it does not
    reuse the route builder.
    """
    out: list[Violation] = []
    t = inst.travel_time
    md, ed = inst.md, inst.ed
    served: dict[int, str] = {}
    seen_vehicles: set[int] = set()
    for col in solution.routes:
        v = inst.vehicles[col.vehicle]
        if col.vehicle in seen_vehicles:
            out.append(Violation("Depot", (v.id,), "vehicle used by two routes"))
        seen_vehicles.add(col.vehicle)
        ids = tuple(inst.interventions[i].id for i in col.stops)
        if len(set(col.stops)) != len(col.stops):
            out.append(Violation("Elementarity", (v.id, *ids)))
        if len(col.starts) != len(col.stops):
            out.append(Violation("Chaining", (v.id,), "start times do not match stops"))
            continue
        for i in col.stops:
            itv = inst.interventions[i]
            if itv.id not in v.eligible:
                out.append(Violation("Eligibility", (v.id, itv.id)))
            if i in served:
                out.append(Violation("Coverage", (itv.id,), f"also on {served[i]}"))
            served[i] = v.id
        prev, ready = v.depot, 0
        used = [0] * len(inst.intervals)
        for i, u in zip(col.stops, col.starts):
            itv = inst.interventions[i]
            if u < ready + t[prev][itv.node]:
                out.append(Violation("Chaining", (v.id, itv.id), f"start {u} too early"))
            if u < itv.window_start or u + itv.duration > itv.window_end:
                out.append(Violation("TimeWindow", (itv.id,), f"start {u}"))
            if itv.duration < LONG_THRESHOLD and u < md < u + itv.duration:
                out.append(Violation("HalfDay", (itv.id,), f"start {u} straddles {md}"))
            for k, q in enumerate(itv.resource_use):
                used[k] += q
            prev, ready = itv.node, u + itv.duration
        if ready + t[prev][v.depot] > ed:
            out.append(Violation("DayEnd", (v.id,), f"returns at {ready + t[prev][v.depot]}"))
        for k, m in enumerate(v.capacity):
            if used[k] > m:
                out.append(Violation("Resource", (v.id, inst.intervals[k].id),
                                     f"{used[k]} > {m}"))
        try:
            dur, cost, cov = route_metrics(col.stops, col.vehicle, inst)
        except EligibilityError:
            continue
        if (dur, cost, cov) != (col.duration, col.cost, col.coverage):
            out.append(Violation("Metrics", (v.id,), "stored D_r/c_r/coverage disagree"))
    return out


def columns_from(routes: Iterable[Column]) -> tuple[Column, ...]:
    return tuple(sorted(routes, key=lambda c: c.key))
