"""Small parsing helpers shared by the command-line pipelines."""
from __future__ import annotations

import json
from typing import List, Sequence, Tuple

from limitgroups.services.errors import PatternError


def parse_matrix(text: str) -> Tuple[int, int, int, int]:
    """``"1 2 0 1"`` (or comma separated) to four integers, row-major."""
    parts = text.replace(",", " ").split()
    if len(parts) != 4:
        raise PatternError(f"a 2x2 matrix needs four integers, got {text!r}")
    try:
        a, b, c, d = (int(x) for x in parts)
    except ValueError:
        raise PatternError(f"matrix entries must be integers: {text!r}") from None
    return a, b, c, d


def load_json_file(path: str):
    try:
        with open(path, "r", encoding="utf-8") as f:
            return json.load(f)
    except FileNotFoundError:
        raise PatternError(f"input file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise PatternError(f"{path} is not valid JSON: {exc}") from None


def load_matrices(path: str) -> List[Tuple[int, int, int, int]]:
    data = load_json_file(path)
    if not isinstance(data, list):
        raise PatternError(f"{path} must hold a list of four-integer rows")
    out = []
    for row in data:
        if not isinstance(row, Sequence) or isinstance(row, str) or len(row) != 4:
            raise PatternError(f"bad matrix row {row!r} in {path}")
        out.append(tuple(int(x) for x in row))
    return out
