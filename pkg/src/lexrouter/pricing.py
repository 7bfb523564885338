"""Per-vehicle pricing: label-setting search for routes of high reduced cost.

Labels carry the completion time at their last node, per-interval resource
use, the visited set and the set of interventions still reachable, all as
Python ints used as bitmasks over intervention indices.

Dominance level ``s`` applies conditions 1..s conjunctively:

1. reduced cost no smaller
2. reachable set is a superset
3. no later ready time (or the other label can reach nothing more)
4. no larger resource use per interval, with the two slack exceptions

Level 0 disables dominance entirely.
"""
from __future__ import annotations

import heapq
import time
from dataclasses import dataclass, field

from .master import DualValues, Phase
from .model import Column, Instance, LONG_THRESHOLD, make_column

DEPOT = -1


class Label:
    __slots__ = ("node", "cost", "time", "res", "visited", "reach", "parent", "serial",
                 "dead", "duration", "_pending")

    def __init__(self, node, cost, time_, res, visited, reach, parent, serial, duration):
        self.node = node
        self.cost = cost
        self.time = time_
        self.res = res
        self.visited = visited
        self.reach = reach
        self.parent = parent
        self.serial = serial
        self.duration = duration
        self.dead = False
        self._pending = None

    @property
    def path(self) -> tuple[int, ...]:
        """Intervention indices from the depot to this label."""
        out = []
        lab = self
        while lab is not None and lab.node != DEPOT:
            out.append(lab.node)
            lab = lab.parent
        return tuple(reversed(out))

    def __repr__(self):
        return f"Label(node={self.node}, cost={self.cost:.4g}, t={self.time}, res={self.res})"


def _bits(mask: int):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


@dataclass(frozen=True)
class PricingConfig:
    eta: int | None = 20
    mode: str = "improve"  # "improve" | "closure"
    threshold: float = 0.0
    level: int = 4
    label_cap: int = 1_000_000
    eps: float = 1e-6
    deadline: float | None = None

    def __post_init__(self):
        if self.mode not in ("improve", "closure"):
            raise ValueError(f"unknown pricing mode {self.mode!r}")
        if not 0 <= self.level <= 4:
            raise ValueError("dominance level must be in 0..4")
        if self.eta is not None and self.eta < 1:
            raise ValueError("eta must be positive")


@dataclass
class PricingResult:
    columns: list[Column] = field(default_factory=list)
    reduced_costs: list[float] = field(default_factory=list)
    complete: bool = True
    labels: int = 0
    stopped_by_eta: bool = False


class Pricer:
    """Extension and dominance machinery for one vehicle under fixed duals."""

    def __init__(self, inst: Instance, vehicle: int, duals: DualValues, phase: Phase):
        self.inst = inst
        self.vehicle = vehicle
        self.phase = phase
        self.duals = duals
        v = inst.vehicles[vehicle]
        self.depot = v.depot
        self.md, self.ed = inst.md, inst.ed
        w_d, w_c = phase.weights(duals)
        self.w_d, self.w_c = w_d, w_c
        self.eligible = inst.eligible_indices[vehicle]
        self.all_mask = sum(1 << i for i in self.eligible)
        itvs = inst.interventions
        self.node_of = [itv.node for itv in itvs]
        self.dur = [itv.duration for itv in itvs]
        self.s = [itv.window_start for itv in itvs]
        self.e = [itv.window_end for itv in itvs]
        self.short = [itv.duration < LONG_THRESHOLD for itv in itvs]
        self.q = [itv.resource_use for itv in itvs]
        self.cap = v.capacity
        self.nk = len(self.cap)
        self.t = inst.travel_time
        self.back = [inst.travel_time[itv.node][v.depot] for itv in itvs]
        delta = float(inst.delta)
        self.arc = [[w_c * delta * float(x) for x in row] for row in inst.travel_dist]
        self.gain = [w_d * itv.duration - duals.nu[i] for i, itv in enumerate(itvs)]
        self.start_cost = -(w_c * float(v.cost) + duals.mu[vehicle])
        self._serial = 0

    # -- labels -------------------------------------------------------------

    def _next_serial(self) -> int:
        self._serial += 1
        return self._serial

    def initial_label(self) -> Label:
        return Label(DEPOT, self.start_cost, 0, (0,) * self.nk, 0, self.all_mask, None,
                     self._next_serial(), 0)

    def position(self, label: Label) -> int:
        return self.depot if label.node == DEPOT else self.node_of[label.node]

    def _try(self, label: Label, j: int):
        """(start, end, res) of serving ``j`` next, or None if infeasible."""
        a = label.time + self.t[self.position(label)][self.node_of[j]]
        d = self.dur[j]
        start = a if a > self.s[j] else self.s[j]
        if self.short[j] and start < self.md < start + d:
            start = self.md
        end = start + d
        if end > self.e[j] or end + self.back[j] > self.ed:
            return None
        if self.nk:
            res = tuple(r + q for r, q in zip(label.res, self.q[j]))
            for r, m in zip(res, self.cap):
                if r > m:
                    return None
        else:
            res = label.res
        return start, end, res

    def unreachable(self, label: Label) -> int:
        """Bitmask of reachable-set members that cannot be served next."""
        out = 0
        for p in _bits(label.reach):
            if self._try(label, p) is None:
                out |= 1 << p
        return out

    def extend(self, label: Label, j: int) -> Label | None:
        """Extend to intervention ``j`` (or to the depot when ``j == DEPOT``)."""
        if j == DEPOT:
            if label.node == DEPOT:
                return None
            pos = self.position(label)
            arrival = label.time + self.t[pos][self.depot]
            if arrival > self.ed:
                return None
            return Label(DEPOT, label.cost - self.arc[pos][self.depot], arrival, label.res,
                         label.visited, 0, label, self._next_serial(), label.duration)
        bit = 1 << j
        if not label.reach & bit or label.visited & bit:
            return None
        tried = self._try(label, j)
        if tried is None:
            return None
        _, end, res = tried
        pos = self.position(label)
        child = Label(j, label.cost + self.gain[j] - self.arc[pos][self.node_of[j]], end, res,
                      label.visited | bit, label.reach & ~bit, label, self._next_serial(),
                      label.duration + self.dur[j])
        child.reach &= ~self.unreachable(child)
        return child

    def close_cost(self, label: Label) -> float:
        return label.cost - self.arc[self.position(label)][self.depot]

    def pending(self, label: Label) -> tuple[int, ...]:
        """Per-interval resource still claimable by the reachable set."""
        if label._pending is None:
            tot = [0] * self.nk
            for p in _bits(label.reach):
                for k, q in enumerate(self.q[p]):
                    tot[k] += q
            label._pending = tuple(tot)
        return label._pending

    def dominates(self, l1: Label, l2: Label, level: int, same_visited: bool = False) -> bool:
        """Whether ``l1`` dominates ``l2`` under conditions 1..level.

        Exact ties on every active condition are broken in favour of the
        older label.
        """
        if l1 is l2 or level == 0:
            return False
        if l1.node != l2.node:
            raise ValueError("labels end at different nodes")
        if same_visited and l1.visited != l2.visited:
            return False
        if l1.cost < l2.cost:
            return False
        tie = l1.cost == l2.cost
        if level >= 2:
            if l2.reach & ~l1.reach:
                return False
            tie = tie and l1.reach == l2.reach
        if level >= 3:
            if l1.time > l2.time and l2.reach:
                return False
            tie = tie and l1.time == l2.time
        if level >= 4 and l1.res != l2.res:
            tie = False
            p1 = p2 = None
            for k in range(self.nk):
                r1, r2 = l1.res[k], l2.res[k]
                if r1 <= r2:
                    continue
                p1 = p1 or self.pending(l1)
                if p1[k] <= self.cap[k] - r1:
                    continue
                p2 = p2 or self.pending(l2)
                if p2[k] == 0:
                    continue
                return False
        if tie:
            return l1.serial < l2.serial
        return True

    def upper_bound(self, label: Label) -> float:
        """Optimistic reduced cost of any completion of ``label``."""
        ub = label.cost
        for p in _bits(label.reach):
            g = self.gain[p]
            if g > 0:
                ub += g
        return ub

    def replay(self, stops) -> Label | None:
        """Closed label obtained by extending along ``stops`` from the depot."""
        lab = self.initial_label()
        for i in stops:
            lab = self.extend(lab, i)
            if lab is None:
                return None
        return self.extend(lab, DEPOT)

    # -- search -------------------------------------------------------------

    def node_key(self, j: int) -> tuple[float, int]:
        benefit = self.gain[j]
        return ((self.s[j] + self.dur[j]) / max(benefit, 1.0), j)

    def run(self, config: PricingConfig) -> PricingResult:
        closure = config.mode == "closure"
        level = config.level
        result = PricingResult()
        emit_at = config.threshold - config.eps if closure else config.eps
        prune_at = config.threshold - config.eps
        buckets: dict[int, list[Label]] = {DEPOT: [self.initial_label()]}
        kept: dict[int, list[Label]] = {}
        heap = [((float("-inf"), DEPOT), DEPOT)]
        queued = {DEPOT}
        keys = {}
        count = 1
        while heap:
            _, i = heapq.heappop(heap)
            queued.discard(i)
            labels = [lab for lab in buckets.pop(i, ()) if not lab.dead]
            labels.sort(key=lambda lab: (-lab.cost, lab.serial))
            for lab in labels:
                if lab.dead:
                    continue
                if lab.node != DEPOT:
                    rc = self.close_cost(lab)
                    if rc > emit_at:
                        result.columns.append(make_column(lab.path, self.vehicle, self.inst))
                        result.reduced_costs.append(rc)
                        if not closure and config.eta is not None and \
                                len(result.columns) >= config.eta:
                            result.stopped_by_eta = True
                            result.labels = count
                            return result
                for j in _bits(lab.reach):
                    child = self.extend(lab, j)
                    if child is None:
                        continue
                    if closure and self.upper_bound(child) < prune_at:
                        continue
                    here = kept.setdefault(j, [])
                    if level:
                        if any(self.dominates(o, child, level, closure) for o in here):
                            continue
                        survivors = []
                        for o in here:
                            if self.dominates(child, o, level, closure):
                                o.dead = True
                            else:
                                survivors.append(o)
                        here[:] = survivors
                    here.append(child)
                    buckets.setdefault(j, []).append(child)
                    if j not in queued:
                        if j not in keys:
                            keys[j] = self.node_key(j)
                        heapq.heappush(heap, (keys[j], j))
                        queued.add(j)
                    count += 1
                    if count >= config.label_cap:
                        result.complete = False
                        result.labels = count
                        return result
                    if config.deadline is not None and count % 256 == 0 \
                            and time.perf_counter() > config.deadline:
                        result.complete = False
                        result.labels = count
                        return result
        result.labels = count
        return result


def initial_label(inst: Instance, vehicle: int, duals: DualValues, phase: Phase) -> Label:
    return Pricer(inst, vehicle, duals, phase).initial_label()


def extend(label: Label, j: int, inst: Instance, duals: DualValues, phase: Phase,
           vehicle: int) -> Label | None:
    return Pricer(inst, vehicle, duals, phase).extend(label, j)


def price_vehicle(inst: Instance, vehicle: int, duals: DualValues, phase: Phase,
                  config: PricingConfig) -> PricingResult:
    """Routes for ``vehicle`` with reduced cost above zero (improve mode) or
    at least ``config.threshold`` (closure mode)."""
    return Pricer(inst, vehicle, duals, phase).run(config)
