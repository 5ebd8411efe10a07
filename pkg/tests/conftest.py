"""Shared pytest fixtures for the limitgroups test suite.

Fixtures:
    rng: seeded Philox generator
    rank2_short: all reduced words of length <= 3 in F_2
    surface1: genus-3 surface presentation (r = 1)
    comm_double: amalgam double of F_2 over [x1, x2]
    reports_dir: temporary reports directory wired into AppConfig
    instance_file: factory writing an instance JSON file
"""
from __future__ import annotations

import json
import sys
from pathlib import Path
from typing import Any, Callable, Dict, Generator, List

import pytest

# Ensure the package is importable
ROOT = Path(__file__).resolve().parents[1]
if str(ROOT) not in sys.path:
    sys.path.insert(0, str(ROOT))

from limitgroups.config.settings import AppConfig  # noqa: E402
from limitgroups.services.construct import double_of_free  # noqa: E402
from limitgroups.services.surface import make_presentation  # noqa: E402
from limitgroups.services.words import FreeWord, parse_word, words_up_to  # noqa: E402
from limitgroups.utils.rng import make_rng  # noqa: E402


# ============================================================================
# Words and groups
# ============================================================================

@pytest.fixture
def rng():
    return make_rng(1234)


@pytest.fixture(scope="session")
def rank2_short() -> List[FreeWord]:
    return words_up_to(2, 3)


@pytest.fixture(scope="session")
def surface1():
    return make_presentation(1)


@pytest.fixture(scope="session")
def comm_double():
    return double_of_free(2, parse_word("[x1,x2]", 2))


# ============================================================================
# Files and configuration
# ============================================================================

@pytest.fixture
def reports_dir(tmp_path: Path, monkeypatch) -> Generator[Path, None, None]:
    target = tmp_path / "reports"
    monkeypatch.setattr(AppConfig, "REPORTS_DIR", str(target))
    yield target


@pytest.fixture
def instance_file(tmp_path: Path) -> Callable[[Dict[str, Any]], str]:
    """Write an instance dict to JSON and return the path."""
    counter = {"n": 0}

    def _make(data: Dict[str, Any]) -> str:
        counter["n"] += 1
        path = tmp_path / f"instance_{counter['n']}.json"
        path.write_text(json.dumps(data), encoding="utf-8")
        return str(path)

    return _make
