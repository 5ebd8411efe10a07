from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional

from limitgroups.config.settings import AppConfig
from limitgroups.utils.versioning import version_tags


# Per-run limits; radius 0 is the one-element ball.
LIMIT_FLOORS = {"window": 1, "samples": 1, "length": 1, "syllables": 1, "spread": 1, "cap": 1, "radius": 0}


def _current_caps() -> Dict[str, int]:
    return {
        "ball_radius": AppConfig.BALL_RADIUS_CAP,
        "onset_search": AppConfig.ONSET_SEARCH_CAP,
        "exponent": AppConfig.EXPONENT_CAP,
        "cylinder_depth": AppConfig.CYLINDER_DEPTH_CAP,
        "modulus": AppConfig.MODULUS_CAP,
        "enumeration": AppConfig.ENUMERATION_CAP,
        "syllables": AppConfig.SYLLABLE_CAP,
        "form_length": AppConfig.FORM_LENGTH_CAP,
        "image_length": AppConfig.IMAGE_LENGTH_CAP,
        "free_pair_length": AppConfig.FREE_PAIR_LENGTH_CAP,
    }


@dataclass
class ExperimentConfig:
    command: str
    seed: int = AppConfig.DEFAULT_SEED
    out: Optional[str] = None
    progress: bool = False
    params: Dict[str, Any] = field(default_factory=dict)
    caps: Dict[str, int] = field(default_factory=_current_caps)

    def __post_init__(self) -> None:
        bad = sorted(name for name, value in self.caps.items() if value < 1)
        if bad:
            raise ValueError(f"caps must be positive: {', '.join(bad)}")
        low = sorted(
            f"{name}={self.params[name]}"
            for name, floor in LIMIT_FLOORS.items()
            if self.params.get(name) is not None and self.params[name] < floor
        )
        if low:
            raise ValueError(f"limits out of range: {', '.join(low)}")
        if not 0 <= self.seed < 2**64:
            raise ValueError(f"seed must be a 64-bit unsigned integer, got {self.seed}")

    def as_dict(self) -> Dict[str, Any]:
        # progress only affects stderr, so it stays out of the echo
        return {
            "command": self.command,
            "seed": self.seed,
            "out": self.out,
            "params": dict(self.params),
            "caps": dict(self.caps),
        }


@dataclass
class Report:
    config: ExperimentConfig
    rows: List[Dict[str, Any]] = field(default_factory=list)
    summary: Dict[str, Any] = field(default_factory=dict)

    @property
    def failures(self) -> int:
        return int(self.summary.get("failures", 0))

    def add(self, row: Dict[str, Any]) -> None:
        self.rows.append(row)

    def finalize(self, sort_key: Optional[Callable[[Dict[str, Any]], Any]] = None, **summary: Any) -> "Report":
        if sort_key is not None:
            self.rows.sort(key=sort_key)
        self.summary = {"rows": len(self.rows), "failures": 0, **summary}
        return self

    def as_dict(self) -> Dict[str, Any]:
        return {
            "schema": AppConfig.REPORT_SCHEMA,
            "version": AppConfig.VERSION,
            "modules": version_tags(),
            "command": self.config.command,
            "config": self.config.as_dict(),
            "rows": self.rows,
            "summary": self.summary,
        }

    def to_json(self) -> str:
        return json.dumps(self.as_dict(), sort_keys=True, indent=2) + "\n"
