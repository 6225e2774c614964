from __future__ import annotations

import json

import pytest

from wresforms.cli import main, parse_constraint


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_flat_text_and_exit_status(capsys):
    code, out, _ = run(capsys, "flat", "--n", "2")
    assert code == 0
    assert "4 f_{;i} h^{;i}" in out and "routes agree" in out


def test_flat_json_is_deterministic(capsys):
    _, a, _ = run(capsys, "flat", "--n", "4", "--format", "json")
    _, b, _ = run(capsys, "flat", "--n", "4", "--format", "json")
    assert a == b
    body = json.loads(a)
    assert body["diff"] == [] and body["n"] == 4


def test_area_measure_scales_entries(capsys):
    _, norm, _ = run(capsys, "flat", "--n", "2", "--format", "json")
    _, area, _ = run(capsys, "flat", "--n", "2", "--format", "json", "--measure", "area")
    assert json.loads(area)["note"] == "times pi^1"
    assert json.loads(area)["direct"] != json.loads(norm)["direct"]


@pytest.mark.parametrize("argv", [["flat", "--n", "3"], ["flat", "--n", "10"], ["verify", "nonsense"],
                                  ["solve", "--constraint", "Q = 1"], ["solve", "--constraint", "B == 1"],
                                  ["verify", "family", "--E", "1/0"], []])
def test_usage_errors(capsys, argv):
    code, _, _ = run(capsys, *argv)
    assert code == 2


def test_latex_output(capsys):
    code, out, _ = run(capsys, "flat", "--n", "2", "--format", "latex")
    assert code == 0 and r"\partial" in out


def test_verify_passing_suite_report(capsys):
    code, out, _ = run(capsys, "verify", "trace-constants", "flat-routes", "filtration")
    report = json.loads(out)
    assert code == 0
    assert set(report) == {"trace-constants", "flat-routes", "filtration"}
    assert all({"check", "status", "certificate"} <= set(c) for r in report.values() for c in r)


def test_verify_failing_suite_exit_code(capsys):
    code, out, _ = run(capsys, "verify", "variation6")
    assert code == 1
    assert json.loads(out)["variation6"][0]["status"] == "residue"


def test_verify_family_with_rationals_and_threads(capsys, monkeypatch):
    monkeypatch.setenv("WF_THREADS", "2")
    code, out, _ = run(capsys, "verify", "family", "cocycle6", "--E", "3/7", "--G", "-2")
    assert code == 0
    notes = [c for r in json.loads(out).values() for c in r if c.get("informational")]
    assert notes and any(c["status"] == "residue" for c in notes)


def test_solve_default_and_injected(capsys):
    code, out, _ = run(capsys, "solve")
    assert code == 0 and "C = 0" in out and "free: E, G" in out and "[conformal variation" in out
    code, out, _ = run(capsys, "solve", "--constraint", "E = 0", "--constraint", "G=1/2")
    assert code == 0 and "free: none" in out and "G = 1/2" in out
    code, out, _ = run(capsys, "solve", "--constraint", "B = 1")
    assert code == 1 and "inconsistent" in out and "[injected]" in out


def test_config_file_and_output(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# defaults\nn = 4\nformat = json\n")
    dest = tmp_path / "out.json"
    code, out, _ = run(capsys, "--config", str(cfg), "--output", str(dest), "flat")
    assert code == 0 and out == ""
    assert json.loads(dest.read_text())["n"] == 4
    code, _, _ = run(capsys, "--config", str(tmp_path / "missing.cfg"), "flat")
    assert code == 2


def test_parse_constraint():
    assert parse_constraint("3B - 2A = -32") == ({"B": 3, "A": -2}, -32)
    assert parse_constraint("E=1/2") == ({"E": 1}, 1 / 2)
