from __future__ import annotations

import importlib
from pathlib import Path

import pytest

from limitgroups.config.settings import AppConfig, _safe_int, get_app_version
from limitgroups.utils.versioning import MODULE_VERSIONS, version_tags

ROOT = Path(__file__).resolve().parents[1]


class TestImports:
    @pytest.mark.parametrize(
        "module_name",
        [
            "limitgroups.main",
            "limitgroups.router",
            "limitgroups.models.report",
            "limitgroups.services.words",
            "limitgroups.services.tree",
            "limitgroups.services.baumslag",
            "limitgroups.services.symbolic",
            "limitgroups.services.surface",
            "limitgroups.services.construct",
            "limitgroups.services.targets",
            "limitgroups.services.experiments",
            "limitgroups.services.storage",
            "limitgroups.utils.rng",
            "limitgroups.utils.helpers",
            "scripts.toolbox",
        ],
    )
    def test_module_imports(self, module_name: str):
        mod = importlib.import_module(module_name)
        assert mod is not None


class TestRoutes:
    def test_every_leaf_command_routed(self):
        from limitgroups.router import get_routes

        assert set(get_routes()) == {
            "baumslag certify",
            "baumslag sweep",
            "surface onset",
            "surface twist-audit",
            "double scan",
            "residual f2xf2",
            "padic hk",
            "padic surject",
            "padic freepair",
        }

    def test_unknown_route(self):
        from limitgroups.router import resolve_route
        from limitgroups.services.errors import UnknownNameError

        with pytest.raises(UnknownNameError):
            resolve_route("surface explode")


class TestConfig:
    def test_caps_positive(self):
        from limitgroups.models.report import ExperimentConfig

        config = ExperimentConfig("surface onset")
        assert all(value >= 1 for value in config.caps.values())
        assert config.caps["ball_radius"] == AppConfig.BALL_RADIUS_CAP
        with pytest.raises(ValueError):
            ExperimentConfig("surface onset", caps={"ball_radius": 0})

    def test_run_limits(self):
        from limitgroups.models.report import ExperimentConfig

        assert ExperimentConfig("surface onset", params={"radius": 0, "window": 1}).params["radius"] == 0
        assert ExperimentConfig("double scan", params={"rank": None, "window": 16}).params["rank"] is None
        with pytest.raises(ValueError, match="window=-5"):
            ExperimentConfig("double scan", params={"window": -5})
        with pytest.raises(ValueError, match="radius=-1"):
            ExperimentConfig("surface onset", params={"radius": -1})

    def test_safe_int(self, monkeypatch):
        monkeypatch.setenv("LIMITGROUPS_TEST_INT", "12")
        assert _safe_int("LIMITGROUPS_TEST_INT", 3) == 12
        monkeypatch.setenv("LIMITGROUPS_TEST_INT", "twelve")
        assert _safe_int("LIMITGROUPS_TEST_INT", 3) == 3
        monkeypatch.setenv("LIMITGROUPS_TEST_INT", "-4")
        assert _safe_int("LIMITGROUPS_TEST_INT", 3) == 3
        monkeypatch.delenv("LIMITGROUPS_TEST_INT")
        assert _safe_int("LIMITGROUPS_TEST_INT", 3) == 3

    def test_version_override(self, monkeypatch):
        monkeypatch.setenv("LIMITGROUPS_VERSION", "9.9")
        assert get_app_version() == "9.9"

    def test_version_tags(self):
        tags = version_tags()
        assert tags["library"] == AppConfig.VERSION
        for name in ("words", "tree", "baumslag", "symbolic", "surface", "construct", "targets"):
            assert tags[name] == MODULE_VERSIONS[name]


class TestToolbox:
    def test_bump_version(self):
        from scripts.toolbox import bump_version

        assert bump_version("1.0") == "1.1"
        assert bump_version("1.9") == "2.0"
        assert bump_version("3.4", major=True) == "4.0"
        with pytest.raises(SystemExit):
            bump_version("1.2.3")

    def test_parser_and_routes_agree(self):
        from scripts.toolbox import _wiring_failures

        assert _wiring_failures() == []

    def test_commands_callable(self):
        from scripts import toolbox

        assert callable(toolbox.cmd_health)
        assert callable(toolbox.cmd_smoke)
        assert callable(toolbox.cmd_test)
        assert toolbox.build_parser().parse_args(["test", "--slow"]).slow is True
