"""Shared builders for small hand-made instances."""
from __future__ import annotations

import pytest

from lexrouter.instance_io import GeneratorConfig, generate_random, parse_instance


def line_document(jobs, vehicles=((50, None),), positions=None, md=240, ed=480, delta="1",
                  dist_factor=1, intervals=None, capacity=None):
    """Document with every node on a line; travel minutes equal the gap.

    ``jobs`` holds ``(d, s, e)`` or ``(d, s, e, q)`` tuples, ``vehicles``
    holds ``(g, eligible ids or None)``; all depots sit at position 0.
    """
    positions = positions or [10 * (k + 1) for k in range(len(jobs))]
    nodes = [{"id": f"D{v}", "kind": "depot"} for v in range(len(vehicles))]
    nodes += [{"id": f"N{k}", "kind": "intervention"} for k in range(len(jobs))]
    xs = [0] * len(vehicles) + list(positions)
    n = len(xs)
    time = [[abs(xs[a] - xs[b]) for b in range(n)] for a in range(n)]
    dist = [[str(dist_factor * abs(xs[a] - xs[b])) for b in range(n)] for a in range(n)]
    intervals = intervals or []
    itvs = []
    for k, job in enumerate(jobs):
        d, s, e = job[:3]
        q = job[3] if len(job) > 3 else {}
        itvs.append({"id": f"I{k}", "node": f"N{k}", "d": d, "s": s, "e": e, "q": q})
    vs = []
    for v, (g, elig) in enumerate(vehicles):
        vs.append({"id": f"V{v}", "depot_node": f"D{v}", "g": str(g),
                   "m": dict(capacity or {iv["id"]: iv["end"] - iv["start"] for iv in intervals}),
                   "eligible": [it["id"] for it in itvs] if elig is None else list(elig)})
    return {"name": "line", "day": {"md": md, "ed": ed, "delta": str(delta)},
            "intervals": intervals, "nodes": nodes, "travel": {"time": time, "dist": dist},
            "interventions": itvs, "vehicles": vs}


def line_instance(jobs, **kw):
    return parse_instance(line_document(jobs, **kw))


def tiny_random(seed, n_i=None, n_v=None, **kw):
    """Seeded random instance with at most 8 interventions and 3 vehicles."""
    import numpy as np
    rng = np.random.default_rng([seed, 17])
    n_i = n_i or int(rng.integers(3, 9))
    n_v = n_v or int(rng.integers(2, 4))
    kw.setdefault("window_tightness", float(rng.uniform(0.2, 0.8)))
    return generate_random(GeneratorConfig(n_i, n_v, seed=seed, **kw))


@pytest.fixture
def two_jobs():
    return line_instance([(60, 0, 480), (90, 0, 480)])


VERDICTS: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if VERDICTS:
        terminalreporter.section("acceptance criteria")
        for line in sorted(VERDICTS):
            terminalreporter.write_line(line)
