"""Benchmark records, best-gap tables and solution/report serialisation."""
from __future__ import annotations

import csv
import io
import json
import logging
from dataclasses import dataclass, field
from fractions import Fraction

from .driver import METHODS, solve
from .instance_io import category_of, format_decimal
from .model import Instance, LexSolution, validate_schedule

log = logging.getLogger(__name__)

CSV_COLUMNS = ("instance", "category", "method", "f1", "f2", "exact", "status",
               "iterations", "routes", "error")


@dataclass
class BenchRecord:
    instance: str
    category: str
    method: str
    f1: int | None = None
    f2: Fraction | None = None
    exact: bool = False
    status: str = ""
    stats: dict = field(default_factory=dict)
    wall_time: float = 0.0
    error: str | None = None

    @property
    def ok(self) -> bool:
        return self.error is None and self.f1 is not None

    def to_dict(self, timings: bool = False) -> dict:
        out = {"instance": self.instance, "category": self.category, "method": self.method,
               "f1": self.f1, "f2": None if self.f2 is None else format_decimal(self.f2),
               "exact": self.exact, "status": self.status, "stats": self.stats,
               "error": self.error}
        if timings:
            out["wall_time"] = round(self.wall_time, 6)
        return out

    @classmethod
    def from_dict(cls, d: dict) -> "BenchRecord":
        return cls(d["instance"], d["category"], d["method"], d.get("f1"),
                   None if d.get("f2") is None else Fraction(d["f2"]), d.get("exact", False),
                   d.get("status", ""), d.get("stats", {}), d.get("wall_time", 0.0),
                   d.get("error"))


def run_bench(instances: list[Instance], methods, **config) -> list[BenchRecord]:
    """One record per (instance, method); failures are recorded, not raised."""
    methods = list(methods)
    if not methods:
        raise ValueError("no methods given")
    for m in methods:
        if m not in METHODS:
            raise ValueError(f"unknown method {m!r}")
    records = []
    for inst in instances:
        cat = category_of(inst)
        for m in methods:
            rec = BenchRecord(inst.name, cat, m)
            try:
                sol, stats = solve(inst, m, **config)
                bad = validate_schedule(sol, inst)
                if bad:
                    raise RuntimeError(f"invalid schedule: {bad[:3]}")
                rec.f1, rec.f2 = sol.objectives
                rec.exact, rec.status = sol.exact, sol.status
                rec.stats = stats.to_dict()
                rec.wall_time = stats.wall_time
            except Exception as exc:  # noqa: BLE001 - recorded per instance
                log.exception("bench failure on %s / %s", inst.name, m)
                rec.error = f"{type(exc).__name__}: {exc}"
            records.append(rec)
    return records


def _pct(num, den) -> float:
    return 0.0 if den == 0 else float(Fraction(num) / Fraction(den) * 100)


def gap_report(records: list[BenchRecord]) -> dict:
    """Per category and method: best-solution counts (a, b) and mean best-gaps.

    ``a`` counts instances where the method reaches the best total duration;
    ``b`` those where it also has the lowest cost among such methods.  The
    cost gap is averaged over the ``a`` instances only and is ``None`` when
    there are none.
    """
    by_inst: dict[tuple[str, str], dict[str, BenchRecord]] = {}
    methods: list[str] = []
    for r in records:
        by_inst.setdefault((r.category, r.instance), {})[r.method] = r
        if r.method not in methods:
            methods.append(r.method)
    for key, recs in by_inst.items():
        if set(recs) != set(methods):
            raise ValueError(f"instance {key[1]!r} lacks records for "
                             f"{sorted(set(methods) - set(recs))}")
    out: dict = {}
    for (cat, _), recs in sorted(by_inst.items()):
        ok = [r for r in recs.values() if r.ok]
        best1 = max((r.f1 for r in ok), default=0)
        top = [r for r in ok if r.f1 == best1]
        best2 = min((r.f2 for r in top), default=Fraction(0))
        table = out.setdefault(cat, {m: {"n": 0, "a": 0, "b": 0, "_g1": [], "_g2": []}
                                     for m in methods})
        for m in methods:
            r = recs[m]
            row = table[m]
            row["n"] += 1
            f1 = r.f1 if r.ok else 0
            row["_g1"].append(_pct(best1 - f1, best1))
            if r.ok and r.f1 == best1:
                row["a"] += 1
                row["_g2"].append(_pct(r.f2 - best2, best2))
                if r.f2 == best2:
                    row["b"] += 1
    for cat, table in out.items():
        for m, row in table.items():
            g1, g2 = row.pop("_g1"), row.pop("_g2")
            row["best"] = [row.pop("a"), row.pop("b")]
            row["gap"] = [round(sum(g1) / len(g1), 6) if g1 else 0.0,
                          round(sum(g2) / len(g2), 6) if g2 else None]
    return out


def report_document(records: list[BenchRecord], timings: bool = False) -> dict:
    return {"methods": list(dict.fromkeys(r.method for r in records)),
            "records": [r.to_dict(timings) for r in records],
            "gaps": gap_report(records)}


def records_from_report(doc: dict) -> list[BenchRecord]:
    return [BenchRecord.from_dict(d) for d in doc["records"]]


def report_json(records: list[BenchRecord], timings: bool = False) -> str:
    return json.dumps(report_document(records, timings), indent=1) + "\n"


def report_csv(records: list[BenchRecord]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in records:
        ph = r.stats.get("phases", [])
        w.writerow([r.instance, r.category, r.method, "" if r.f1 is None else r.f1,
                    "" if r.f2 is None else format_decimal(r.f2), int(r.exact), r.status,
                    sum(p.get("iterations", 0) for p in ph),
                    sum(p.get("routes_generated", 0) for p in ph), r.error or ""])
    return buf.getvalue()


def format_gap_table(gaps: dict) -> str:
    """Plain-text table in the (a, b) / (gap1, gap2) layout."""
    lines = []
    for cat, table in gaps.items():
        lines.append(f"[{cat}]")
        for m, row in table.items():
            g1, g2 = row["gap"]
            g2s = "--" if g2 is None else f"{g2:.2f}"
            lines.append(f"  {m:<10} n={row['n']:<3} best=({row['best'][0]}, {row['best'][1]})"
                         f"  gap=({g1:.2f}, {g2s})")
    return "\n".join(lines)


def solution_document(sol: LexSolution, inst: Instance, method: str = "",
                      stats: dict | None = None) -> dict:
    return {
        "instance": inst.name,
        "method": method,
        "objectives": {"f1": sol.f1, "f2": format_decimal(sol.f2)},
        "exact": sol.exact,
        "status": sol.status,
        "routes": [{"vehicle": inst.vehicles[c.vehicle].id, "duration": c.duration,
                    "cost": format_decimal(c.cost), "stops": c.timeline(inst)}
                   for c in sol.routes],
        "stats": sol.stats if stats is None else stats,
    }
