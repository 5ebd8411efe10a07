from __future__ import annotations

import logging
import os
from pathlib import Path
from typing import Callable, TypeVar

from dotenv import load_dotenv


logger = logging.getLogger("LIMITGROUPS")

T = TypeVar("T", int, float)

ROOT_DIR = Path(__file__).resolve().parents[2]

# A local .env never overrides variables already exported by the shell.
load_dotenv(ROOT_DIR / ".env", override=False)


def _env_number(env_var: str, default: T, cast: Callable[[str], T]) -> T:
    """Read ``env_var`` through ``cast``; log and keep ``default`` when it is unset or malformed."""
    raw = os.getenv(env_var, "").strip()
    if not raw:
        return default
    try:
        value = cast(raw)
    except (ValueError, TypeError):
        logger.warning("Invalid %s for %s=%r, using default %s", cast.__name__, env_var, raw, default)
        return default
    if value < 0:
        logger.warning("Negative value for %s=%r, using default %s", env_var, raw, default)
        return default
    return value


def _safe_int(env_var: str, default: int) -> int:
    return _env_number(env_var, default, int)


def _safe_float(env_var: str, default: float) -> float:
    return _env_number(env_var, default, float)


def get_app_version() -> str:
    """``LIMITGROUPS_VERSION``, else the tag in ``VERSION.txt``, else ``"1.0"``."""
    override = os.getenv("LIMITGROUPS_VERSION", "").strip()
    if override:
        return override
    try:
        lines = (ROOT_DIR / "VERSION.txt").read_text(encoding="utf-8").split()
    except OSError:
        lines = []
    return lines[0] if lines else "1.0"


class AppConfig:
    APP_NAME = "limitgroups"
    VERSION = get_app_version()
    REPORT_SCHEMA = "limitgroups.report/1"
    REPORTS_DIR = os.getenv("LIMITGROUPS_REPORTS_DIR", os.path.join("artifacts", "reports"))

    BALL_RADIUS_CAP = _safe_int("LIMITGROUPS_BALL_RADIUS_CAP", 4)
    ONSET_SEARCH_CAP = _safe_int("LIMITGROUPS_ONSET_SEARCH_CAP", 200)
    EXPONENT_CAP = _safe_int("LIMITGROUPS_EXPONENT_CAP", 64)
    CYLINDER_DEPTH_CAP = _safe_int("LIMITGROUPS_CYLINDER_DEPTH_CAP", 96)
    MODULUS_CAP = _safe_int("LIMITGROUPS_MODULUS_CAP", 625)
    ENUMERATION_CAP = _safe_int("LIMITGROUPS_ENUMERATION_CAP", 200_000)
    SYLLABLE_CAP = _safe_int("LIMITGROUPS_SYLLABLE_CAP", 4)
    FORM_LENGTH_CAP = _safe_int("LIMITGROUPS_FORM_LENGTH_CAP", 8)
    IMAGE_LENGTH_CAP = _safe_int("LIMITGROUPS_IMAGE_LENGTH_CAP", 3)
    FREE_PAIR_LENGTH_CAP = _safe_int("LIMITGROUPS_FREE_PAIR_LENGTH_CAP", 12)
    DEFAULT_SEED = _safe_int("LIMITGROUPS_SEED", 20240601)

    SAVE_LOCK_TIMEOUT = _safe_int("LIMITGROUPS_LOCK_TIMEOUT", 5)
    SAVE_LOCK_RETRY_SLEEP = _safe_float("LIMITGROUPS_LOCK_RETRY_SLEEP", 0.1)


def ensure_reports_dir() -> None:
    os.makedirs(AppConfig.REPORTS_DIR, exist_ok=True)


logging.basicConfig(level=logging.INFO, format="%(asctime)s [%(levelname)s] %(message)s")
