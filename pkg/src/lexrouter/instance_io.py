"""Instance documents (JSON), random generation and size standardisation."""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from decimal import Decimal
from fractions import Fraction
from pathlib import Path

import numpy as np

from .model import Instance, Intervention, Interval, ModelError, Node, Vehicle

CATEGORIES = {"XS": (20, 4), "S": (100, 20), "M": (150, 30), "L": (200, 40)}


class SchemaError(ModelError):
    """Document does not match the instance schema."""


def format_decimal(x: Fraction) -> str:
    """Exact decimal string when one exists, otherwise ``p/q``."""
    x = Fraction(x)
    den = x.denominator
    for p in (2, 5):
        while den % p == 0:
            den //= p
    if den != 1:
        return f"{x.numerator}/{x.denominator}"
    d = Decimal(x.numerator) / Decimal(x.denominator)
    s = format(d.normalize(), "f")
    return s


def _get(obj, key, path, kind=None):
    if not isinstance(obj, dict) or key not in obj:
        raise SchemaError(f"{path}.{key}: missing")
    val = obj[key]
    if kind is int and (isinstance(val, bool) or not isinstance(val, int)):
        raise SchemaError(f"{path}.{key}: expected integer")
    if kind is str and not isinstance(val, str):
        raise SchemaError(f"{path}.{key}: expected string")
    if kind is list and not isinstance(val, list):
        raise SchemaError(f"{path}.{key}: expected list")
    if kind is dict and not isinstance(val, dict):
        raise SchemaError(f"{path}.{key}: expected object")
    return val


def _rational(val, path) -> Fraction:
    if isinstance(val, bool) or not isinstance(val, (str, int)):
        raise SchemaError(f"{path}: expected decimal string")
    try:
        return Fraction(val)
    except (ValueError, ZeroDivisionError):
        raise SchemaError(f"{path}: not a decimal {val!r}") from None


def parse_instance(doc: dict) -> Instance:
    """Build a validated :class:`Instance` from a JSON-like document."""
    day = _get(doc, "day", "$", dict)
    md = _get(day, "md", "day", int)
    ed = _get(day, "ed", "day", int)
    delta = _rational(_get(day, "delta", "day"), "day.delta")
    intervals = []
    for k, iv in enumerate(doc.get("intervals", [])):
        p = f"intervals[{k}]"
        intervals.append(Interval(_get(iv, "id", p, str), _get(iv, "start", p, int),
                                  _get(iv, "end", p, int)))
    kidx = {iv.id: k for k, iv in enumerate(intervals)}
    if len(kidx) != len(intervals):
        raise SchemaError("intervals: duplicate id")
    nodes = []
    for k, nd in enumerate(_get(doc, "nodes", "$", list)):
        p = f"nodes[{k}]"
        kind = _get(nd, "kind", p, str)
        if kind not in ("depot", "intervention"):
            raise SchemaError(f"{p}.kind: must be 'depot' or 'intervention'")
        nodes.append(Node(_get(nd, "id", p, str), kind))
    nidx = {nd.id: k for k, nd in enumerate(nodes)}
    if len(nidx) != len(nodes):
        raise SchemaError("nodes: duplicate id")
    travel = _get(doc, "travel", "$", dict)
    tt = _get(travel, "time", "travel", list)
    dd = _get(travel, "dist", "travel", list)
    time_m = []
    for i, row in enumerate(tt):
        if not isinstance(row, list):
            raise SchemaError(f"travel.time[{i}]: expected list")
        for j, x in enumerate(row):
            if isinstance(x, bool) or not isinstance(x, int):
                raise SchemaError(f"travel.time[{i}][{j}]: expected integer minutes")
        time_m.append(tuple(row))
    dist_m = []
    for i, row in enumerate(dd):
        if not isinstance(row, list):
            raise SchemaError(f"travel.dist[{i}]: expected list")
        dist_m.append(tuple(_rational(x, f"travel.dist[{i}][{j}]") for j, x in enumerate(row)))

    def node_ref(val, path):
        if val not in nidx:
            raise SchemaError(f"{path}: unknown node {val!r}")
        return nidx[val]

    itvs = []
    for k, it in enumerate(_get(doc, "interventions", "$", list)):
        p = f"interventions[{k}]"
        q = _get(it, "q", p, dict) if "q" in it else {}
        use = [0] * len(intervals)
        for key, val in q.items():
            if key not in kidx:
                raise SchemaError(f"{p}.q: unknown interval {key!r}")
            if isinstance(val, bool) or not isinstance(val, int):
                raise SchemaError(f"{p}.q.{key}: expected integer minutes")
            use[kidx[key]] = val
        itvs.append(Intervention(_get(it, "id", p, str), node_ref(_get(it, "node", p), f"{p}.node"),
                                 _get(it, "d", p, int), _get(it, "s", p, int),
                                 _get(it, "e", p, int), tuple(use)))
    vehicles = []
    for k, vh in enumerate(_get(doc, "vehicles", "$", list)):
        p = f"vehicles[{k}]"
        m = _get(vh, "m", p, dict) if "m" in vh else {}
        cap = [0] * len(intervals)
        for key in kidx:
            if key not in m:
                raise SchemaError(f"{p}.m: missing capacity for interval {key!r}")
        for key, val in m.items():
            if key not in kidx:
                raise SchemaError(f"{p}.m: unknown interval {key!r}")
            if isinstance(val, bool) or not isinstance(val, int):
                raise SchemaError(f"{p}.m.{key}: expected integer minutes")
            cap[kidx[key]] = val
        elig = _get(vh, "eligible", p, list)
        vehicles.append(Vehicle(_get(vh, "id", p, str),
                                node_ref(_get(vh, "depot_node", p), f"{p}.depot_node"),
                                _rational(_get(vh, "g", p), f"{p}.g"), tuple(cap),
                                frozenset(elig)))
    return Instance(tuple(nodes), tuple(itvs), tuple(vehicles), tuple(time_m), tuple(dist_m),
                    md, ed, delta, tuple(intervals), doc.get("name", ""),
                    dict(doc.get("meta", {})))


def to_document(inst: Instance) -> dict:
    """Inverse of :func:`parse_instance`."""
    ks = [iv.id for iv in inst.intervals]
    doc = {
        "name": inst.name,
        "day": {"md": inst.md, "ed": inst.ed, "delta": format_decimal(inst.delta)},
        "intervals": [{"id": iv.id, "start": iv.start, "end": iv.end} for iv in inst.intervals],
        "nodes": [{"id": nd.id, "kind": nd.kind} for nd in inst.nodes],
        "travel": {
            "time": [list(row) for row in inst.travel_time],
            "dist": [[format_decimal(x) for x in row] for row in inst.travel_dist],
        },
        "interventions": [
            {"id": it.id, "node": inst.nodes[it.node].id, "d": it.duration,
             "s": it.window_start, "e": it.window_end,
             "q": {k: q for k, q in zip(ks, it.resource_use) if q}}
            for it in inst.interventions
        ],
        "vehicles": [
            {"id": v.id, "depot_node": inst.nodes[v.depot].id, "g": format_decimal(v.cost),
             "m": dict(zip(ks, v.capacity)),
             "eligible": [it.id for it in inst.interventions if it.id in v.eligible]}
            for v in inst.vehicles
        ],
    }
    if inst.meta:
        doc["meta"] = inst.meta
    return doc


def dumps(doc) -> str:
    return json.dumps(doc, indent=1) + "\n"


def load_instance(path) -> Instance:
    with open(path) as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"$: invalid JSON ({exc})") from None
    inst = parse_instance(doc)
    if not inst.name:
        object.__setattr__(inst, "name", Path(path).stem)
    return inst


def save_instance(inst: Instance, path) -> None:
    Path(path).write_text(dumps(to_document(inst)))


@dataclass(frozen=True)
class GeneratorConfig:
    n_interventions: int
    n_vehicles: int
    seed: int = 0
    box_km: float = 20.0
    speed_kmh: float = 40.0
    long_share: float = 0.3
    window_tightness: float = 0.5
    eligibility: float = 0.7
    md: int = 240
    ed: int = 480
    delta: str = "0.5"
    cost_range: tuple[int, int] = (150, 250)
    capacity_share: float = 0.85
    intervals: str = "halves"  # "halves" | "none"
    short_durations: tuple[int, ...] = (30, 45, 60, 90)
    long_durations: tuple[int, ...] = (120, 150, 180, 240)
    name: str = ""

    def __post_init__(self):
        if self.n_interventions < 1 or self.n_vehicles < 1:
            raise ValueError("need at least one intervention and one vehicle")
        if not 0 <= self.window_tightness <= 1:
            raise ValueError("window_tightness must be in [0, 1]")

    @classmethod
    def from_dict(cls, d: dict) -> "GeneratorConfig":
        d = dict(d)
        for key in ("cost_range", "short_durations", "long_durations"):
            if key in d:
                d[key] = tuple(d[key])
        return cls(**d)

    def to_dict(self) -> dict:
        return asdict(self)


def _travel(points: np.ndarray, speed_kmh: float):
    diff = points[:, None, :] - points[None, :, :]
    km = np.sqrt((diff ** 2).sum(-1))
    minutes = np.ceil(km * 60.0 / speed_kmh - 1e-9).astype(np.int64)
    np.fill_diagonal(minutes, 0)
    n = len(points)
    for h in range(n):  # guard the triangle inequality against float noise
        minutes = np.minimum(minutes, minutes[:, h:h + 1] + minutes[h:h + 1, :])
    dist = [[Fraction(f"{km[i, j]:.1f}") if i != j else Fraction(0) for j in range(n)]
            for i in range(n)]
    return minutes, dist


def generate_random(config: GeneratorConfig) -> Instance:
    """Random instance; identical output for identical config and seed."""
    c = config
    rng = np.random.default_rng(c.seed)
    n_i, n_v = c.n_interventions, c.n_vehicles
    points = rng.uniform(0.0, c.box_km, size=(n_v + n_i, 2))
    minutes, dist = _travel(points, c.speed_kmh)
    nodes = [Node(f"D{k}", "depot") for k in range(n_v)] + \
            [Node(f"N{i}", "intervention") for i in range(n_i)]

    long_flags = rng.random(n_i) < c.long_share
    if n_i >= 4:
        if long_flags.all():
            long_flags[0] = False
        if not long_flags.any():
            long_flags[1] = True
    durations = [int(rng.choice(c.long_durations if lf else c.short_durations))
                 for lf in long_flags]
    if c.intervals == "halves":
        intervals = [Interval("am", 0, c.md), Interval("pm", c.md, c.ed),
                     Interval("day", 0, c.ed)]
    else:
        intervals = []

    itvs = []
    for i, d in enumerate(durations):
        d = min(d, c.ed)
        length = d + int(round((1.0 - c.window_tightness) * (c.ed - d)))
        s = int(rng.integers(0, c.ed - length + 1))
        e = s + length
        if d < 120 and c.md - d < s < c.md and e - d < c.md:
            e = min(c.ed, c.md + d)
        use = tuple(d if iv.start <= s and e <= iv.end else 0 for iv in intervals)
        itvs.append(Intervention(f"I{i}", n_v + i, d, s, e, use))

    elig = rng.random((n_v, n_i)) < c.eligibility
    for i in range(n_i):
        if not elig[:, i].any():
            elig[int(rng.integers(0, n_v)), i] = True
    for v in range(n_v):
        if not elig[v].any():
            elig[v, int(rng.integers(0, n_i))] = True
    vehicles = []
    for v in range(n_v):
        g = int(rng.integers(c.cost_range[0], c.cost_range[1] + 1))
        cap = tuple(int(round(c.capacity_share * (iv.end - iv.start))) for iv in intervals)
        vehicles.append(Vehicle(f"V{v}", v, Fraction(g), cap,
                                frozenset(f"I{i}" for i in range(n_i) if elig[v, i])))
    meta = {"generator": {k: (list(x) if isinstance(x, tuple) else x)
                          for k, x in c.to_dict().items()}}
    return Instance(tuple(nodes), tuple(itvs), tuple(vehicles),
                    tuple(tuple(int(x) for x in row) for row in minutes),
                    tuple(tuple(row) for row in dist), c.md, c.ed, Fraction(c.delta),
                    tuple(intervals), c.name or f"gen_{n_i}_{n_v}_{c.seed}", meta)


@dataclass
class RawInstance:
    instance: Instance
    source: str = ""
    original_counts: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.original_counts:
            self.original_counts = {"interventions": len(self.instance.interventions),
                                    "vehicles": len(self.instance.vehicles)}


def subset(inst: Instance, vehicle_ids, intervention_ids, name: str = "", meta=None) -> Instance:
    """Restriction of ``inst`` to the given vehicles and interventions.

    Nodes no longer referenced are dropped; everything kept is unchanged.
    """
    keep_v = [v for v in inst.vehicles if v.id in set(vehicle_ids)]
    keep_i = [it for it in inst.interventions if it.id in set(intervention_ids)]
    used = sorted({v.depot for v in keep_v} | {it.node for it in keep_i})
    remap = {old: new for new, old in enumerate(used)}
    ids = {it.id for it in keep_i}
    return Instance(
        tuple(inst.nodes[k] for k in used),
        tuple(Intervention(it.id, remap[it.node], it.duration, it.window_start, it.window_end,
                           it.resource_use) for it in keep_i),
        tuple(Vehicle(v.id, remap[v.depot], v.cost, v.capacity, v.eligible & ids)
              for v in keep_v),
        tuple(tuple(inst.travel_time[a][b] for b in used) for a in used),
        tuple(tuple(inst.travel_dist[a][b] for b in used) for a in used),
        inst.md, inst.ed, inst.delta, inst.intervals, name or inst.name,
        dict(meta if meta is not None else inst.meta))


def standardize(raw: RawInstance | Instance, target_vehicles: int, ratio: int = 5,
                seed: int = 0) -> Instance:
    """Cut ``raw`` down to ``target_vehicles`` vehicles and ``ratio`` times as
    many interventions: random vehicles are removed first, then random
    interventions."""
    if isinstance(raw, Instance):
        raw = RawInstance(raw, raw.name)
    inst = raw.instance
    n_v, n_i = len(inst.vehicles), len(inst.interventions)
    target_i = ratio * target_vehicles
    if target_vehicles < 1 or n_v < target_vehicles or n_i < target_i:
        raise ValueError(f"raw instance has {n_v} vehicles / {n_i} interventions; "
                         f"need at least {target_vehicles} / {target_i}")
    rng = np.random.default_rng(seed)
    keep_v = sorted(rng.choice(n_v, size=target_vehicles, replace=False).tolist())
    keep_i = sorted(rng.choice(n_i, size=target_i, replace=False).tolist())
    vids = [inst.vehicles[k].id for k in keep_v]
    iids = [inst.interventions[k].id for k in keep_i]
    meta = dict(inst.meta)
    meta["standardize"] = {
        "source": raw.source, "original": raw.original_counts, "seed": seed, "ratio": ratio,
        "vehicle_removal": "uniform-random",
        "removed_vehicles": [v.id for v in inst.vehicles if v.id not in set(vids)],
        "removed_interventions": [it.id for it in inst.interventions if it.id not in set(iids)],
    }
    return subset(inst, vids, iids, inst.name, meta)


def category_of(inst: Instance) -> str:
    shape = (len(inst.interventions), len(inst.vehicles))
    for name, dims in CATEGORIES.items():
        if dims == shape:
            return name
    return f"I{shape[0]}_V{shape[1]}"


def make_category_instance(category: str, seed: int, ratio: int = 5, **overrides) -> Instance:
    """Generate an oversized raw instance and standardise it to ``category``."""
    n_i, n_v = CATEGORIES[category]
    rng = np.random.default_rng([seed, 7919])
    raw_v = n_v + int(rng.integers(0, 3))
    raw_i = max(n_i, ratio * raw_v) + int(rng.integers(0, 10))
    cfg = GeneratorConfig(raw_i, raw_v, seed=seed, name=f"{category}_{seed}", **overrides)
    raw = RawInstance(generate_random(cfg), source=cfg.name)
    return standardize(raw, n_v, ratio, seed)
