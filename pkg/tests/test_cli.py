import json

import pytest

from lexrouter.cli import main


@pytest.fixture
def instance_file(tmp_path):
    cfg = tmp_path / "gen.json"
    cfg.write_text(json.dumps({"n_interventions": 6, "n_vehicles": 2}))
    out = tmp_path / "inst.json"
    assert main(["gen", "--config", str(cfg), "--seed", "4", "--out", str(out)]) == 0
    return out


def test_gen_is_deterministic(tmp_path, instance_file):
    again = tmp_path / "again.json"
    cfg = tmp_path / "gen.json"
    main(["gen", "--config", str(cfg), "--seed", "4", "--out", str(again)])
    assert again.read_bytes() == instance_file.read_bytes()


def test_standardize(tmp_path):
    raw, out = tmp_path / "raw.json", tmp_path / "xs.json"
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"n_interventions": 30, "n_vehicles": 5}))
    main(["gen", "--config", str(cfg), "--seed", "1", "--out", str(raw)])
    assert main(["standardize", "--in", str(raw), "--vehicles", "4", "--out", str(out)]) == 0
    doc = json.loads(out.read_text())
    assert (len(doc["interventions"]), len(doc["vehicles"])) == (20, 4)


def test_solve_and_oracle_agree(tmp_path, instance_file):
    sol_path, orc_path = tmp_path / "sol.json", tmp_path / "orc.json"
    assert main(["solve", "--in", str(instance_file), "--method", "cg-s",
                 "--out", str(sol_path)]) == 0
    assert main(["oracle", "--in", str(instance_file), "--out", str(orc_path)]) == 0
    sol, orc = json.loads(sol_path.read_text()), json.loads(orc_path.read_text())
    assert sol["objectives"] == orc["objectives"]
    assert isinstance(sol["objectives"]["f2"], str)
    for route in sol["routes"]:
        assert {"node", "arrival", "start", "end"} <= set(route["stops"][0])


def test_solve_is_byte_identical(tmp_path, instance_file):
    outs = []
    for k in range(2):
        p = tmp_path / f"s{k}.json"
        main(["solve", "--in", str(instance_file), "--seed", "2", "--out", str(p)])
        outs.append(p.read_bytes())
    assert outs[0] == outs[1]


def test_bench_writes_reports(tmp_path, instance_file, capsys):
    d = tmp_path / "bench"
    d.mkdir()
    (d / "a.json").write_bytes(instance_file.read_bytes())
    for ext in ("json", "csv"):
        rep = tmp_path / f"rep.{ext}"
        assert main(["bench", "--dir", str(d), "--methods", "cg-w,compact-w",
                     "--report", str(rep)]) == 0
        assert rep.read_text()
    assert "cg-w" in capsys.readouterr().out


def test_parse_failure_exit_code(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{ not json")
    assert main(["solve", "--in", str(bad)]) == 2
    bad.write_text("{}")
    assert main(["solve", "--in", str(bad)]) == 2
    assert "day" in capsys.readouterr().err


def test_missing_file_exit_code(tmp_path):
    assert main(["oracle", "--in", str(tmp_path / "none.json")]) == 2
