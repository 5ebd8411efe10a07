"""Command-line surface: report shape, determinism, report files and exit codes."""
from __future__ import annotations

import json
from typing import List

import pytest

from limitgroups import router
from limitgroups.config.settings import AppConfig
from limitgroups.main import EXIT_INVARIANT, EXIT_OK, EXIT_USAGE, build_parser, main
from limitgroups.models.report import ExperimentConfig, Report
from limitgroups.services.errors import InvariantError
from limitgroups.utils.versioning import MODULE_VERSIONS


def _run(capsys, argv: List[str]):
    code = main(argv)
    out = capsys.readouterr().out
    return code, (json.loads(out) if out else None)


# ---------------------------------------------------------------------------
# Parsing
# ---------------------------------------------------------------------------


class TestParser:
    def test_globals_before_or_after_subcommand(self):
        parser = build_parser()
        first = parser.parse_args(["--seed", "9", "surface", "onset"])
        second = parser.parse_args(["surface", "onset", "--seed", "9"])
        assert first.seed == second.seed == 9
        assert first.out is None

    def test_bare_out(self):
        args = build_parser().parse_args(["padic", "freepair", "--out"])
        assert args.out == ""

    def test_report_alias(self):
        args = build_parser().parse_args(["padic", "hk", "--report", "r.json"])
        assert args.out == "r.json"


# ---------------------------------------------------------------------------
# Pipelines
# ---------------------------------------------------------------------------


class TestReports:
    def test_report_header(self, capsys):
        code, report = _run(capsys, ["padic", "freepair", "--length", "4"])
        assert code == EXIT_OK
        assert report["schema"] == AppConfig.REPORT_SCHEMA
        assert report["version"] == AppConfig.VERSION
        assert set(MODULE_VERSIONS) <= set(report["modules"])
        assert report["command"] == "padic freepair"
        assert report["config"]["params"]["length"] == 4
        assert report["summary"]["free"] is True
        assert [row["length"] for row in report["rows"]] == [1, 2, 3, 4]

    def test_surface_onset_rows(self, capsys):
        code, report = _run(capsys, ["surface", "onset", "--radius", "1", "--certified"])
        assert code == EXIT_OK
        assert len(report["rows"]) == 12
        assert all(row["range_clean"] for row in report["rows"])
        assert all(row["empirical_onset"] <= row["certified_onset"] for row in report["rows"])

    def test_radius_zero_is_empty(self, capsys):
        code, report = _run(capsys, ["surface", "onset", "--radius", "0"])
        assert code == EXIT_OK
        assert report["rows"] == []
        assert report["summary"]["rows"] == 0

    def test_twist_audit(self, capsys):
        code, report = _run(capsys, ["surface", "twist-audit", "--samples", "20", "--length", "5"])
        assert code == EXIT_OK
        assert report["summary"]["failures"] == 0
        assert report["summary"]["relator_trivial"] is True

    def test_baumslag_certify(self, capsys, instance_file):
        path = instance_file({"z": "x1", "a": ["x2", "x2"]})
        code, report = _run(capsys, ["baumslag", "certify", "--instance", path, "--samples", "50"])
        assert code == EXIT_OK
        row = report["rows"][0]
        assert row["verified"] and row["mutation_rejected"]
        assert row["counterexamples"] == []
        assert report["summary"]["N"] == 3

    def test_baumslag_sweep(self, capsys, instance_file):
        path = instance_file({"z": "x1", "a": ["x2", "x2"]})
        code, report = _run(capsys, ["baumslag", "sweep", "--instance", path, "--window", "1", "--cap", "3"])
        assert code == EXIT_OK
        assert [row["low"] for row in report["rows"]] == [1, 2, 3]
        assert report["summary"]["consistent"] is True

    def test_double_scan(self, capsys):
        code, report = _run(capsys, ["double", "scan", "--syllables", "2", "--length", "2", "--window", "6"])
        assert code == EXIT_OK
        assert len(report["rows"]) == 64
        assert report["summary"]["first_copy_fixed"] is True

    def test_residual_f2xf2(self, capsys):
        code, report = _run(capsys, ["residual", "f2xf2", "--cap", "1"])
        assert code == EXIT_OK
        assert report["rows"][0]["assignments"] == 177
        assert report["summary"]["nonseparable"] is True

    def test_padic_surject(self, capsys):
        code, report = _run(capsys, ["padic", "surject", "--p", "3"])
        assert code == EXIT_OK
        assert report["summary"]["group"] == "SL2(Z/3)"
        assert report["rows"][0]["closure"] == 24

    def test_non_free_pair_is_reported(self, capsys):
        code, report = _run(capsys, ["padic", "freepair", "--a", "1 1 0 1", "--b", "1 1 0 1", "--length", "4"])
        assert code == EXIT_OK
        assert report["summary"]["shortest_relation"] == 2
        assert [row["free"] for row in report["rows"]] == [True, False, False, False]


class TestDeterminism:
    def test_identical_runs(self, capsys):
        argv = ["--seed", "77", "surface", "twist-audit", "--samples", "15", "--length", "6"]
        assert main(argv) == EXIT_OK
        first = capsys.readouterr().out
        assert main(argv) == EXIT_OK
        assert capsys.readouterr().out == first

    def test_seed_is_echoed(self, capsys):
        _, report = _run(capsys, ["--seed", "5", "padic", "surject", "--p", "3"])
        assert report["config"]["seed"] == 5


class TestReportFiles:
    def test_out_matches_stdout(self, capsys, tmp_path):
        path = tmp_path / "freepair.json"
        assert main(["--out", str(path), "padic", "freepair", "--length", "3"]) == EXIT_OK
        assert path.read_text(encoding="utf-8") == capsys.readouterr().out

    def test_bare_out_uses_reports_dir(self, capsys, reports_dir):
        assert main(["padic", "freepair", "--length", "3", "--out"]) == EXIT_OK
        written = reports_dir / "padic_freepair.json"
        assert json.loads(written.read_text(encoding="utf-8"))["command"] == "padic freepair"

    def test_unwritable_path(self, capsys, tmp_path):
        blocker = tmp_path / "file"
        blocker.write_text("x", encoding="utf-8")
        code = main(["--out", str(blocker / "out.json"), "padic", "freepair", "--length", "2"])
        assert code == EXIT_USAGE


# ---------------------------------------------------------------------------
# Exit codes
# ---------------------------------------------------------------------------


class TestExitCodes:
    @pytest.mark.parametrize(
        "argv",
        [
            ["surface", "explode"],
            ["baumslag", "certify"],
            ["surface", "onset", "--radius", "two"],
            [],
        ],
    )
    def test_usage_errors(self, capsys, argv):
        assert main(argv) == EXIT_USAGE
        assert capsys.readouterr().out == ""

    @pytest.mark.parametrize(
        "argv",
        [
            ["double", "scan", "--window", "-5", "--syllables", "1", "--length", "1"],
            ["double", "scan", "--syllables", "0"],
            ["double", "scan", "--length", "0"],
            ["surface", "onset", "--window", "0"],
            ["surface", "onset", "--radius", "-1"],
            ["surface", "twist-audit", "--samples", "0"],
            ["surface", "twist-audit", "--length", "-2"],
            ["residual", "f2xf2", "--cap", "0"],
            ["padic", "hk", "--syllables", "0"],
            ["padic", "freepair", "--length", "-1"],
        ],
    )
    def test_limits_below_floor(self, capsys, argv):
        assert main(argv) == EXIT_USAGE
        assert capsys.readouterr().out == ""

    @pytest.mark.parametrize(
        "action, limit",
        [
            ("certify", ["--samples", "0"]),
            ("certify", ["--spread", "-3"]),
            ("sweep", ["--window", "0"]),
            ("sweep", ["--cap", "-1"]),
        ],
    )
    def test_baumslag_limits_below_floor(self, capsys, instance_file, action, limit):
        path = instance_file({"z": "x1", "a": ["x2", "x2"]})
        assert main(["baumslag", action, "--instance", path, *limit]) == EXIT_USAGE
        assert capsys.readouterr().out == ""

    def test_negative_seed(self, capsys):
        assert main(["--seed", "-1", "padic", "freepair"]) == EXIT_USAGE

    def test_missing_instance_file(self, capsys, tmp_path):
        assert main(["baumslag", "certify", "--instance", str(tmp_path / "none.json")]) == EXIT_USAGE

    def test_hypothesis_violation(self, capsys, instance_file):
        path = instance_file({"z": "x1", "a": ["x2", "x1^2"]})
        assert main(["baumslag", "certify", "--instance", path]) == EXIT_USAGE

    def test_proper_power_edge(self, capsys):
        assert main(["double", "scan", "--c", "x1^2", "--rank", "2"]) == EXIT_USAGE

    def test_invariant_error(self, capsys, monkeypatch):
        def broken(config: ExperimentConfig) -> Report:
            raise InvariantError("relator survived")

        monkeypatch.setattr(router, "get_routes", lambda: {"surface onset": broken})
        assert main(["surface", "onset"]) == EXIT_INVARIANT

    def test_failures_in_summary(self, capsys, monkeypatch):
        def failing(config: ExperimentConfig) -> Report:
            report = Report(config).finalize()
            report.summary["failures"] = 1
            return report

        monkeypatch.setattr(router, "get_routes", lambda: {"surface onset": failing})
        code, report = _run(capsys, ["surface", "onset"])
        assert code == EXIT_INVARIANT
        assert report["summary"]["failures"] == 1
