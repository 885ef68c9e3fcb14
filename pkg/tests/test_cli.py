from __future__ import annotations

import json
import subprocess
import sys

import jsonschema
import pytest

from semitop.cli import REPORT_SCHEMA, main, run


@pytest.fixture
def chain3(tmp_path):
    p = tmp_path / "chain3.json"
    p.write_text(json.dumps({"table": [[0, 0, 0], [0, 1, 1], [0, 1, 2]]}))
    return str(p)


def _json(capsys, argv):
    code = main(argv + ["--format", "json"])
    out = capsys.readouterr().out
    return code, out, (json.loads(out) if out.strip() else None)


def test_zariski_end_to_end(capsys, chain3):
    code, _, rep = _json(capsys, ["zariski", "--cayley", chain3, "--words", "with-constants"])
    assert code == 0 and rep["verdict"] == "pass"
    assert rep["result"]["opens"] == [[], [0], [1], [2], [0, 1], [0, 2], [1, 2], [0, 1, 2]]
    assert rep["result"]["separation"] == {"T0": True, "T1": True, "T2": True}


def test_propx_verify(capsys):
    code, _, rep = _json(capsys, ["propx", "verify", "--monoid", "XX", "--window", "64", "--samples", "10",
                                  "--seed", "7"])
    assert code == 0 and rep["verdict"] == "pass"
    assert rep["provenance"]["seed"] == 7


def test_partition_mul(capsys):
    code, _, rep = _json(capsys, ["partition", "mul", "[[0,0'],[1,1']]", "[[0,1'],[1,0']]"])
    assert code == 0
    assert rep["result"]["certificates"]


@pytest.mark.parametrize("argv", [
    ["compose", "{(0,1)}", "{(1,0)}"],
    ["metric", "--metric", "d4", "{(0,1)}", "{(0,2)}"],
    ["topology", "enumerate", "3"],
    ["cantor", "witness", "flip(0)", "--samples", "8"],
    ["clone", "generate", '{"q":2,"arity":2,"table":[1,1,1,0]}'],
    ["horn", "--case", "gamma", "--samples", "3"],
    ["schema"],
])
def test_reports_validate(capsys, argv):
    code, _, rep = _json(capsys, argv)
    jsonschema.validate(rep, REPORT_SCHEMA)
    assert code == (0 if rep["verdict"] == "pass" else 1)


def test_published_schema_is_valid():
    jsonschema.Draft202012Validator.check_schema(REPORT_SCHEMA)


def test_json_is_byte_identical(capsys):
    argv = ["propx", "verify", "--monoid", "InjX", "--samples", "3", "--seed", "11"]
    a = _json(capsys, argv)[1]
    b = _json(capsys, argv)[1]
    assert a == b and "elapsed" not in a


def test_text_output_has_timing(capsys):
    assert main(["topology", "enumerate", "2"]) == 0
    assert "elapsed" in capsys.readouterr().out


@pytest.mark.parametrize("argv", [
    ["frobnicate"],
    ["partition", "mul", "[[0,0'],[1", "[[0,1']]"],
    ["compose", "{(0,1)", "{(1,2)}"],
    ["compose", "{(0,1)}", "{(1,2)}"],
    ["metric", "--metric", "d9", "{}", "{}"],
    ["zariski", "--cayley", "/nonexistent.json"],
])
def test_usage_errors_exit_2(capsys, argv):
    assert main(argv) == 2
    assert "error" in capsys.readouterr().err


def test_parse_error_has_position(capsys):
    main(["compose", "{(0,1),(x", "{}"])
    err = capsys.readouterr().err
    assert "position" in err or "col" in err


def test_cap_env(monkeypatch, capsys):
    monkeypatch.setenv("SEMITOP_CAP", "3")
    assert main(["topology", "enumerate", "4"]) == 2
    capsys.readouterr()
    monkeypatch.setenv("SEMITOP_CAP", "5")
    code, _, rep = _json(capsys, ["topology", "enumerate", "4"])
    assert code == 0 and rep["result"]["count"] == 355


def test_batch_empty(tmp_path, capsys):
    m = tmp_path / "empty.json"
    m.write_text("[]")
    code, _, rep = _json(capsys, ["batch", str(m)])
    assert code == 0 and rep["verdict"] == "pass" and rep["checks"] == []


def test_batch_isolates_corrupted_entry(tmp_path, capsys):
    m = tmp_path / "mixed.json"
    m.write_text(json.dumps([["topology", "enumerate", "2"], "compose '{(0,' '{}'",
                             ["topology", "enumerate", "3"], ["batch", "x"]]))
    code, _, rep = _json(capsys, ["batch", str(m)])
    jsonschema.validate(rep, REPORT_SCHEMA)
    assert code == 1 and rep["verdict"] == "fail"
    rows = rep["result"]["entries"]
    assert [r["exit_code"] for r in rows] == [0, 2, 0, 2]
    assert "error" in rows[1] and rows[2]["verdict"] == "pass"


def test_batch_line_manifest(tmp_path, capsys):
    m = tmp_path / "cmds.txt"
    m.write_text("# comment\ntopology enumerate 2\nhorn --case alpha --samples 2\n")
    code, _, rep = _json(capsys, ["batch", str(m)])
    assert code == 0 and rep["result"]["count"] == 2


def test_batch_of_suites(tmp_path, capsys):
    names = ["zariski-oracle", "semitopological", "max-chain", "topology-counts", "metrics", "normalize",
             "embeddings", "cardinality", "horn"]
    m = tmp_path / "suites.json"
    m.write_text(json.dumps({"commands": [["suite", n] for n in names]
                             + [["suite", "propx", "--samples", "2"]]}))
    code, _, rep = _json(capsys, ["batch", str(m)])
    assert code == 0 and rep["verdict"] == "pass"
    assert rep["result"]["count"] == len(names) + 1


def test_console_script_exit_codes(tmp_path):
    cmd = [sys.executable, "-m", "semitop.cli"]
    assert subprocess.run(cmd + ["topology", "enumerate", "2"], capture_output=True).returncode == 0
    assert subprocess.run(cmd + ["nope"], capture_output=True).returncode == 2


def test_run_returns_report():
    code, rep, err = run(["schema"])
    assert code == 0 and err is None and rep["command"] == "schema"
