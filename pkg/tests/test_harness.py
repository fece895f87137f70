from __future__ import annotations

import json

import pytest

from paracontact.harness import ConfigError, dump_config, example_config, load_config, load_example
from paracontact.harness.config import json_line_index
from paracontact.harness.registry import EXAMPLE_IDS, STRUCTURES
from paracontact.harness.report import emit_report
from paracontact.harness.run import analyze, check_structure, verify_theorems


@pytest.mark.parametrize("sid", list(STRUCTURES))
def test_registry_round_trips_through_config(sid, tmp_path):
    original = load_example(sid)
    path = tmp_path / "cfg.json"
    path.write_text(dump_config(original))
    again = load_config(path)
    assert again.structure == original.structure
    assert again.metric == original.metric
    assert [h.immersion for h in again.hypersurfaces] == [h.immersion for h in original.hypersurfaces]
    assert [h.expected for h in again.hypersurfaces] == [h.expected for h in original.hypersurfaces]
    assert again.to_config() == original.to_config()


def _text(cfg: dict) -> str:
    return json.dumps(cfg, indent=2)


def test_eta_wrong_length_is_dimension_error_with_line():
    cfg = example_config("6.4")
    cfg["eta"] = ["0", "1"]
    text = _text(cfg)
    with pytest.raises(ConfigError) as exc:
        load_config(text)
    err = exc.value
    assert "dimension mismatch" in str(err)
    assert err.path == "$.eta"
    assert err.line == text.splitlines().index('  "eta": [') + 1


def test_metric_required_for_lap_suite():
    cfg = example_config("6.1")
    cfg["run"] = {"suites": ["lap"]}
    with pytest.raises(ConfigError, match="metric required"):
        load_config(cfg)
    cfg = example_config("6.1")
    cfg["expected"]["structure"]["lap"] = True
    with pytest.raises(ConfigError, match="metric required"):
        load_config(cfg)


def test_schema_violation_reports_path_and_line():
    cfg = example_config("6.3")
    cfg["hypersurfaces"][0]["transversal"] = 7
    text = _text(cfg)
    with pytest.raises(ConfigError) as exc:
        load_config(text)
    assert exc.value.path == "$.hypersurfaces[0].transversal"
    assert exc.value.line is not None
    assert '"transversal": 7' in text.splitlines()[exc.value.line - 1]


def test_expression_and_symbol_errors():
    cfg = example_config("6.4")
    cfg["metric"][0][0] = "exp(-2*z"
    with pytest.raises(ConfigError, match="expression error"):
        load_config(_text(cfg))
    cfg = example_config("6.4")
    cfg["xi"][0] = "w"
    with pytest.raises(ConfigError, match="unknown symbols"):
        load_config(cfg)
    cfg = example_config("6.4/M1")
    cfg["hypersurfaces"][0]["map"][2] = "x + q"
    with pytest.raises(ConfigError, match="unknown symbols"):
        load_config(cfg)


def test_invalid_json_reports_line():
    with pytest.raises(ConfigError) as exc:
        load_config('{\n  "coords": ["x", "y"],\n  "phi": [\n}')
    assert exc.value.line == 4


def test_missing_file():
    with pytest.raises(ConfigError, match="cannot read"):
        load_config("/nonexistent/cfg.json")


def test_line_index_tracks_nested_values():
    text = '{\n "a": [\n  1,\n  {"b": "x"}\n ]\n}'
    idx = json_line_index(text)
    assert idx[("a",)] == 2 and idx[("a", 0)] == 3 and idx[("a", 1, "b")] == 4


def test_run_overrides():
    p = load_example("6.4", {"seed": 5, "points": 7, "tol": 1e-8})
    assert (p.run.seed, p.run.points, p.run.tol) == (5, 7, 1e-8)
    p = load_example("6.4")
    assert (p.run.seed, p.run.points, p.run.tol) == (42, 20, 1e-9)


def test_check_structure_matrix():
    r3 = check_structure(load_example("6.3"))
    assert r3.ok
    assert r3.data["suites"]["lp_sasakian"] is False and r3.data["suites"]["lap"] is True
    r4 = check_structure(load_example("6.4"))
    assert r4.ok and all(r4.data["suites"][k] for k in ("ac", "lap", "lp_contact", "lp_sasakian", "normal"))
    r1 = check_structure(load_example("6.1"))
    assert r1.ok and r1.data["suites"]["normal"]


def test_explicit_suite_makes_failures_count():
    p = load_example("6.3", {"suites": ["lp_sasakian"]})
    p.expected_structure.clear()
    r = check_structure(p)
    assert not r.ok


def test_expected_discrepancies_detected():
    r = analyze(load_example("6.4/M1"))
    entries = [e for e in r.get("discrepancies").entries]
    assert all(e.passed for e in entries)
    normal = entries[0]
    assert normal.detail["detected"] is True and normal.detail["expected_discrepancy"] is True
    r2 = analyze(load_example("6.2"))
    assert r2.get("discrepancies").entries[0].detail["detected"] is True
    r42 = analyze(load_example("6.4/M2"))
    flags = [e.detail["detected"] for e in r42.get("discrepancies").entries]
    assert flags == [False, True, False]


def test_discrepancy_failure_when_expectation_wrong():
    cfg = example_config("6.4/M1")
    cfg["hypersurfaces"][0]["discrepancies"][0]["expected_discrepancy"] = False
    r = analyze(load_config(cfg))
    assert not r.ok
    assert r.failures()[0][0] == "discrepancies"


def test_report_json_contains_theorem_entries():
    r = analyze(load_example("6.4/M1"))
    data = json.loads(emit_report(r, "json"))
    assert data["schema"] == "paracontact.report/1"
    entries = [e for s in data["sections"] for e in s["entries"]]
    hit = [e for e in entries if e["theorem"] == "5.5a"]
    assert hit and hit[0]["pass"] is True and hit[0]["max_residual"] == 0.0


def test_report_is_deterministic():
    a = emit_report(analyze(load_example("6.4/M1")), "json")
    b = emit_report(analyze(load_example("6.4/M1")), "json")
    assert a == b
    ta = emit_report(analyze(load_example("6.4/M2")), "text")
    tb = emit_report(analyze(load_example("6.4/M2")), "text")
    assert ta == tb


def test_failing_report_contains_witness():
    p = load_example("6.3", {"suites": ["lp_sasakian"]})
    p.expected_structure.clear()
    text = emit_report(check_structure(p), "text").decode()
    assert "FAIL" in text and "witness:" in text and "RESULT: FAIL" in text


def _verdicts(report):
    return [(s.title, e.name, e.passed) for s in report.sections for e in s.report.entries]


def test_seed_never_flips_verdicts():
    base = _verdicts(verify_theorems())
    for seed in (1, 2024):
        assert _verdicts(verify_theorems(overrides={"seed": seed})) == base


def test_parallel_run_is_order_deterministic():
    serial = emit_report(verify_theorems(), "json")
    parallel = emit_report(verify_theorems(jobs=4), "json")
    assert serial == parallel


def test_transversal_override():
    r = analyze(load_example("6.4/M1"), transversal="normal")
    assert r.data["transversal"]["tag"] == "normal"
    assert r.ok


def test_all_examples_listed():
    assert set(EXAMPLE_IDS) == {"6.1/M1", "6.1/M2", "6.2", "6.3", "6.4/M1", "6.4/M2"}
