"""Command-line front end: scenario configs, exit codes, stable reports."""

from __future__ import annotations

import csv
import json
from importlib import resources
from pathlib import Path

import pytest

from momentkit.cli import main
from momentkit.scenarios import SCENARIO_KINDS, validate_config


def fixture_path(name: str) -> str:
    return str(resources.files("momentkit").joinpath("fixtures", name))


def run_cli(*args) -> int:
    return main(list(args))


def read_report(out: Path, stem: str) -> dict:
    return json.loads((out / f"{stem}.report.json").read_text())


def test_all_bundled_fixtures(tmp_path):
    expected = {
        "trace.json": 0,
        "gaussian.json": 0,
        "fundamental_lemma.json": 0,
        "concentration.json": 0,
        "main_theorem.json": 0,
        "main_theorem_kq_violation.json": 1,
        "carleman_gaussian.json": 0,
        "carleman_squared_exponential.json": 0,
        "tilde_trace.json": 0,
        "construct_q.json": 0,
    }
    for name, want in expected.items():
        code = run_cli("run", fixture_path(name), "--out", str(tmp_path))
        assert code == want, name


def test_trace_fixture_report_value(tmp_path):
    assert run_cli("run", fixture_path("trace.json"), "--out", str(tmp_path)) == 0
    rep = read_report(tmp_path, "trace")
    assert rep["results"]["value"] == 5.0
    assert rep["passed"] is True
    assert "version" in rep and "tolerances" in rep


def test_report_byte_identical_and_meta_separate(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    for out in (a, b):
        assert run_cli(
            "run", fixture_path("concentration.json"), "--out", str(out)
        ) == 0
    ra = (a / "concentration.report.json").read_bytes()
    rb = (b / "concentration.report.json").read_bytes()
    assert ra == rb
    meta = json.loads((a / "concentration.report.meta.json").read_text())
    assert "started" in meta and "finished" in meta and "threads" in meta
    assert b"started" not in ra  # timestamps only in the metadata file


def test_seed_override_changes_stochastic_report(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    assert run_cli("run", fixture_path("gaussian.json"), "--out", str(a)) == 0
    assert (
        run_cli("run", fixture_path("gaussian.json"), "--out", str(b), "--seed", "99")
        == 0
    )
    ra = read_report(a, "gaussian")
    rb = read_report(b, "gaussian")
    assert ra["seed"] == 7 and rb["seed"] == 99
    assert (
        ra["results"]["second_moment"]["estimate"]
        != rb["results"]["second_moment"]["estimate"]
    )


def test_malformed_json_exit_2(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert run_cli("run", str(bad)) == 2
    assert run_cli("validate", str(bad)) == 2


def test_missing_file_exit_2(tmp_path):
    assert run_cli("run", str(tmp_path / "nope.json")) == 2


def test_unknown_kind_suggestion(capsys):
    problems = validate_config({"kind": "gausian", "parameters": {}})
    assert any("did you mean 'gaussian'" in p for p in problems)


def test_unknown_fields_rejected():
    cfg = json.loads(Path(fixture_path("trace.json")).read_text())
    cfg["bogus"] = 1
    assert any("unknown top-level" in p for p in validate_config(cfg))
    cfg2 = json.loads(Path(fixture_path("trace.json")).read_text())
    cfg2["parameters"]["bogus"] = 1
    assert any("unknown fields" in p for p in validate_config(cfg2))


def test_empty_config_enumerates_errors():
    problems = validate_config({})
    assert problems
    assert any("kind" in p for p in problems)


def test_validate_ok_all_fixtures():
    for fixture in (
        "trace.json",
        "gaussian.json",
        "fundamental_lemma.json",
        "concentration.json",
        "main_theorem.json",
        "carleman_gaussian.json",
        "tilde_trace.json",
        "construct_q.json",
    ):
        assert run_cli("validate", fixture_path(fixture)) == 0


def test_numerical_error_exit_3(tmp_path):
    cfg = tmp_path / "notpsd.json"
    cfg.write_text(
        json.dumps(
            {
                "kind": "trace",
                "parameters": {"p": [[-1.0]], "q": [[1.0]]},
            }
        )
    )
    assert run_cli("run", str(cfg), "--out", str(tmp_path)) == 3


def test_threads_env_override(tmp_path, monkeypatch):
    monkeypatch.setenv("MOMENTKIT_THREADS", "5")
    assert (
        run_cli(
            "run",
            fixture_path("trace.json"),
            "--out",
            str(tmp_path),
            "--threads",
            "2",
        )
        == 0
    )
    meta = json.loads((tmp_path / "trace.report.meta.json").read_text())
    assert meta["threads"] == 5


def test_csv_rfc4180(tmp_path):
    assert (
        run_cli("run", fixture_path("main_theorem.json"), "--out", str(tmp_path)) == 0
    )
    path = tmp_path / "main_theorem.report.stages.csv"
    raw = path.read_bytes()
    assert b"\r\n" in raw  # RFC-4180 line endings
    with path.open(newline="") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["name", "status"]
    assert len(rows) == 10  # header + nine stages


def test_list_subcommand(capsys):
    assert run_cli("list") == 0
    out = capsys.readouterr().out
    for kind in SCENARIO_KINDS:
        assert kind in out


def test_output_path_from_config(tmp_path):
    assert (
        run_cli(
            "run",
            fixture_path("main_theorem_kq_violation.json"),
            "--out",
            str(tmp_path),
        )
        == 1
    )
    assert (tmp_path / "main_theorem_kq_violation.report.json").exists()
