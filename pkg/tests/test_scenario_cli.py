"""Scenario loading, the published schema, artifact writing, CLI exit codes."""

import json
import subprocess
import sys
from pathlib import Path

import pytest

from delaynet import __version__
from delaynet.cli import main
from delaynet.scenario import (
    ScenarioError,
    load_scenario,
    run_scenario,
    scenario_from_dict,
    scenario_schema,
)

REPO = Path(__file__).resolve().parents[1]
SCENARIOS = REPO / "scenarios"
FIXTURES = Path(__file__).resolve().parent / "fixtures"

BUNDLED = sorted(SCENARIOS.glob("*.json"))


def minimal_doc(**overrides):
    doc = {
        "model": {
            "node": {"type": "linear", "matrix": [[-1.0]]},
            "coupling": {"matrix": [[-1.0, 1.0], [1.0, -1.0]]},
        },
        "history": {"type": "constant", "value": [0.5, -0.5]},
        "integrator": {"step": 0.01, "horizon": 0.1},
    }
    doc.update(overrides)
    return doc


def test_bundle_is_present():
    assert len(BUNDLED) >= 4


@pytest.mark.parametrize("path", BUNDLED, ids=lambda p: p.stem)
def test_bundled_scenarios_load(path):
    scenario = load_scenario(path)
    assert scenario.model.m >= 2
    assert scenario.config.horizon > 0


def test_schema_copies_are_identical():
    packaged = json.dumps(scenario_schema(), sort_keys=True)
    published = json.dumps(
        json.loads((REPO / "schemas" / "scenario.json").read_text(encoding="utf-8")),
        sort_keys=True)
    assert packaged == published


@pytest.mark.parametrize("name, fragment", [
    ("missing_integrator", "'integrator' is a required property"),
    ("bad_gamma", "model.gamma"),
    ("negative_tau", "minimum of 0"),
    ("unknown_node", "'duffing' is not one of"),
    ("unknown_kernel", "'gamma_density' is not one of"),
    ("history_mismatch", "history.value"),
    ("bad_json", "invalid JSON at line"),
])
def test_invalid_fixture_is_rejected_with_located_error(name, fragment):
    with pytest.raises(ScenarioError) as exc:
        load_scenario(FIXTURES / f"{name}.json")
    assert any(fragment in line for line in exc.value.errors)


def test_negative_tau_error_points_at_the_tau_key():
    with pytest.raises(ScenarioError) as exc:
        load_scenario(FIXTURES / "negative_tau.json")
    assert any("$.model.delays.tau" in line for line in exc.value.errors)


def test_declared_node_count_must_match_coupling():
    doc = minimal_doc()
    doc["model"]["m"] = 5
    with pytest.raises(ScenarioError) as exc:
        scenario_from_dict(doc)
    assert any("model.m" in line for line in exc.value.errors)


def test_run_without_certificate_writes_trajectory_and_sync_only(tmp_path):
    scenario = load_scenario(FIXTURES.parent.parent / "scenarios" / "chua_uncoupled.json")
    summary, code = run_scenario(scenario, out_dir=tmp_path)
    assert code == 0
    assert sorted(summary["artifacts"]) == ["sync", "trajectory"]
    assert summary["certificate"] is None
    assert summary["envelope"] is None
    assert (tmp_path / "trajectory.csv").exists()
    assert (tmp_path / "sync.csv").exists()


def test_run_with_certificate_writes_four_artifacts(tmp_path):
    scenario = load_scenario(SCENARIOS / "linear_network.json")
    summary, code = run_scenario(scenario, out_dir=tmp_path)
    assert code == 0
    assert sorted(summary["artifacts"]) == [
        "certificate", "envelope", "sync", "trajectory"]
    assert summary["certificate"]["passed"] is True
    assert summary["envelope"]["verdict"] is True
    report = (tmp_path / "certificate.txt").read_text(encoding="utf-8")
    assert "PASS" in report


def test_single_node_scenario_skips_the_sync_report(tmp_path):
    doc = minimal_doc()
    doc["model"]["coupling"] = {"matrix": [[0.0]]}
    doc["history"]["value"] = [0.5]
    scenario = scenario_from_dict(doc)
    summary, code = run_scenario(scenario, out_dir=tmp_path)
    assert code == 0
    assert summary["sync"] is None
    assert "sync" not in summary["artifacts"]


def test_rerun_is_byte_identical(tmp_path):
    scenario = load_scenario(FIXTURES / "failing_certificate.json")
    run_scenario(scenario, out_dir=tmp_path / "a")
    run_scenario(scenario, out_dir=tmp_path / "b")
    for name in ("trajectory.csv", "certificate.txt", "envelope.csv", "sync.csv"):
        first = (tmp_path / "a" / name).read_bytes()
        second = (tmp_path / "b" / name).read_bytes()
        assert first == second, name


def test_output_stride_thins_the_trajectory_rows(tmp_path):
    doc = minimal_doc(output={"stride": 5})
    scenario = scenario_from_dict(doc)
    summary, _ = run_scenario(scenario, out_dir=tmp_path)
    rows = (tmp_path / "trajectory.csv").read_text().strip().splitlines()
    assert len(rows) - 1 == 3  # samples 0, 5, 10 of the 11-sample run
    assert summary["samples"] == 11


def test_cli_version_prints_the_package_version(capsys):
    assert main(["version"]) == 0
    assert capsys.readouterr().out.strip() == __version__


def test_cli_validate_accepts_every_bundled_scenario(capsys):
    for path in BUNDLED:
        assert main(["validate", str(path)]) == 0
    out = capsys.readouterr().out
    assert "valid scenario" in out


def test_cli_validate_rejects_with_exit_2(capsys):
    code = main(["validate", str(FIXTURES / "unknown_node.json")])
    assert code == 2
    assert "error:" in capsys.readouterr().err


def test_cli_missing_file_is_an_io_error(capsys):
    code = main(["validate", str(FIXTURES / "no_such_file.json")])
    assert code == 5
    assert "cannot read" in capsys.readouterr().err


def test_cli_run_failing_certificate_exits_3(tmp_path, capsys):
    code = main(["run", str(FIXTURES / "failing_certificate.json"),
                 "--out", str(tmp_path), "--quiet"])
    assert code == 3
    assert "certificate" in capsys.readouterr().err


def test_cli_run_blowup_exits_4_and_keeps_partial_artifacts(tmp_path, capsys):
    doc = minimal_doc()
    doc["model"]["node"] = {"type": "linear", "matrix": [[6.0]]}
    doc["model"]["coupling"] = {"matrix": [[0.0]]}
    doc["history"]["value"] = [1.0]
    doc["integrator"] = {"step": 0.01, "horizon": 10.0}
    path = tmp_path / "escape.json"
    path.write_text(json.dumps(doc), encoding="utf-8")
    code = main(["run", str(path), "--out", str(tmp_path / "out"), "--quiet"])
    assert code == 4
    assert "blow-up" in capsys.readouterr().err
    rows = (tmp_path / "out" / "trajectory.csv").read_text().strip().splitlines()
    assert len(rows) > 10


def test_cli_run_quiet_suppresses_the_summary(tmp_path, capsys):
    code = main(["run", str(SCENARIOS / "linear_network.json"),
                 "--out", str(tmp_path), "--quiet"])
    assert code == 0
    assert capsys.readouterr().out == ""


def test_cli_check_quad_pass_and_fail(tmp_path, capsys):
    assert main(["check-quad", str(SCENARIOS / "linear_network.json"),
                 "--quiet"]) == 0
    assert main(["check-quad", str(FIXTURES / "failing_certificate.json"),
                 "--quiet"]) == 3
    code = main(["check-quad", str(SCENARIOS / "chua_uncoupled.json")])
    assert code == 2
    assert "no certificate section" in capsys.readouterr().err


def test_cli_check_quad_report_mentions_the_witness(capsys):
    assert main(["check-quad", str(FIXTURES / "failing_certificate.json")]) == 3
    out = capsys.readouterr().out
    assert "FAIL" in out
    assert "witness" in out


def test_cli_seed_override_changes_the_probe_seed(tmp_path):
    base = json.loads((FIXTURES / "failing_certificate.json").read_text())
    scenario = scenario_from_dict(base)
    summary_a, _ = run_scenario(scenario, out_dir=tmp_path / "a", seed=1)
    summary_b, _ = run_scenario(scenario, out_dir=tmp_path / "b", seed=2)
    assert summary_a["certificate"]["seed"] == 1
    assert summary_b["certificate"]["seed"] == 2


def test_console_entry_point_is_installed():
    proc = subprocess.run([sys.executable, "-m", "delaynet", "version"],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert proc.stdout.strip() == __version__
