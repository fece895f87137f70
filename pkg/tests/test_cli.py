from __future__ import annotations

import json

import pytest

from paracontact.harness.cli import main


def test_list_examples(capsys):
    assert main(["list-examples"]) == 0
    out = capsys.readouterr().out
    assert "6.4/M1" in out and "6.1/M2" in out


def test_check_structure_passes(capsys):
    assert main(["check-structure", "6.4"]) == 0
    assert "RESULT: PASS" in capsys.readouterr().out


def test_analyze_json(capsys):
    assert main(["analyze", "6.4/M1", "--format", "json"]) == 0
    data = json.loads(capsys.readouterr().out)
    assert data["data"]["classification"]["tag"] == "noninvariant-transversal-xi"


def test_global_flags_before_and_after_verb(capsys):
    assert main(["--seed", "3", "analyze", "6.3", "--format", "json"]) == 0
    assert json.loads(capsys.readouterr().out)["run"]["seed"] == 3
    assert main(["analyze", "6.3", "--points", "5", "--format", "json"]) == 0
    assert json.loads(capsys.readouterr().out)["run"]["points"] == 5


def test_failure_exit_code_and_witness(capsys):
    assert main(["check-structure", "6.3", "--suite", "lp_sasakian"]) == 1
    out = capsys.readouterr().out
    assert "witness:" in out


@pytest.mark.parametrize(
    "argv",
    [["analyze", "9.9"], ["check-structure", "/no/such/file.json"], ["export-example", "7.1"], ["bogus-verb"],
     ["analyze", "6.4/M1", "--transversal", "sideways"], ["verify-theorems", "6.9"]],
)
def test_input_errors_exit_2(argv, capsys):
    assert main(argv) == 2


def test_export_and_reanalyze(tmp_path, capsys):
    out = tmp_path / "m1.json"
    assert main(["export-example", "6.4/M1", "-o", str(out)]) == 0
    assert main(["analyze", str(out)]) == 0
    assert "RESULT: PASS" in capsys.readouterr().out


def test_user_config_with_bad_eta_reports_line(tmp_path, capsys):
    cfg = json.loads((main(["export-example", "6.4"]) == 0) and capsys.readouterr().out)
    cfg["eta"] = ["0", "1"]
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(cfg, indent=2))
    assert main(["check-structure", str(path)]) == 2
    err = capsys.readouterr().err
    assert "dimension mismatch" in err and "line" in err


def test_user_transversal_list(capsys):
    assert main(["analyze", "6.4/M1", "--transversal", '["0", "0", "1"]', "--format", "json"]) == 0
    data = json.loads(capsys.readouterr().out)
    assert data["data"]["transversal"]["tag"] == "user"


def test_verify_theorems_exit_zero(capsys):
    assert main(["verify-theorems", "--jobs", "2"]) == 0
    assert "RESULT: PASS" in capsys.readouterr().out
