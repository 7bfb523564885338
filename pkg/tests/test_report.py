import csv
import io
import json
from fractions import Fraction

import pytest

from conftest import tiny_random
from lexrouter.report import (CSV_COLUMNS, BenchRecord, gap_report, records_from_report,
                              report_csv, report_document, report_json, run_bench)


def rec(inst, method, f1, f2, error=None):
    return BenchRecord(inst, "XS", method, f1, None if f2 is None else Fraction(f2),
                       True, "optimal", {}, 0.0, error)


def test_bench_one_record_per_pair():
    records = run_bench([tiny_random(1)], ["cg-w", "cg-s"])
    assert [r.method for r in records] == ["cg-w", "cg-s"]
    assert records[0].f1 == records[1].f1 and records[0].f2 == records[1].f2


def test_bench_rejects_unknown_method():
    with pytest.raises(ValueError):
        run_bench([tiny_random(1)], ["nope"])


def test_time_limited_record_keeps_incumbent():
    from lexrouter.instance_io import make_category_instance
    inst = make_category_instance("XS", seed=3)
    r, = run_bench([inst], ["compact-w"], time_limit=0.5)
    assert r.ok and r.f1 is not None
    assert r.exact is False


def test_single_method():
    gaps = gap_report([rec("a", "m", 100, 10), rec("b", "m", 0, 0)])
    assert gaps["XS"]["m"] == {"n": 2, "best": [2, 2], "gap": [0.0, 0.0]}


def test_dominated_method_has_no_cost_gap():
    records = [rec("a", "x", 100, 10), rec("a", "y", 80, 5),
               rec("b", "x", 50, 10), rec("b", "y", 40, 5)]
    gaps = gap_report(records)["XS"]
    assert gaps["y"]["best"] == [0, 0]
    assert gaps["y"]["gap"] == [pytest.approx(20.0), None]
    assert gaps["x"]["best"] == [2, 2]


def test_hand_computed_table():
    # instance a: x best on f1; instance b: tie on f1, y cheaper
    records = [rec("a", "x", 200, 100), rec("a", "y", 150, 50),
               rec("b", "x", 100, 120), rec("b", "y", 100, 100)]
    gaps = gap_report(records)["XS"]
    assert gaps["x"]["best"] == [2, 1]
    assert gaps["y"]["best"] == [1, 1]
    assert gaps["x"]["gap"] == [0.0, pytest.approx(10.0)]  # (0 + 20) / 2
    assert gaps["y"]["gap"] == [pytest.approx(12.5), 0.0]  # (25 + 0) / 2


def test_failed_record_counts_as_zero():
    records = [rec("a", "x", 100, 10), rec("a", "y", None, None, error="boom")]
    gaps = gap_report(records)["XS"]
    assert gaps["y"] == {"n": 1, "best": [0, 0], "gap": [100.0, None]}


def test_mismatched_instance_sets():
    with pytest.raises(ValueError):
        gap_report([rec("a", "x", 1, 1), rec("a", "y", 1, 1), rec("b", "x", 1, 1)])


def test_json_round_trip_and_idempotence():
    records = [rec("a", "x", 200, "100.5"), rec("a", "y", 150, 50)]
    text = report_json(records)
    doc = json.loads(text)
    again = records_from_report(doc)
    assert report_json(again) == text
    assert gap_report(again) == doc["gaps"]
    assert report_document(again)["records"] == doc["records"]


def test_csv_columns_fixed():
    text = report_csv([rec("a", "x", 200, "100.5"), rec("b", "x", None, None, error="e")])
    rows = list(csv.reader(io.StringIO(text)))
    assert tuple(rows[0]) == CSV_COLUMNS
    assert all(len(r) == len(CSV_COLUMNS) for r in rows)
    assert rows[1][4] == "100.5"
