#!/usr/bin/env python3
"""Maintenance toolbox for limitgroups.

    python scripts/toolbox.py bump [--major]
    python scripts/toolbox.py health
    python scripts/toolbox.py smoke
    python scripts/toolbox.py test [--slow] [-k EXPR]
"""
from __future__ import annotations

import argparse
import importlib
import json
import pathlib
import py_compile
import subprocess
import sys
from typing import List, Tuple


ROOT = pathlib.Path(__file__).resolve().parents[1]
sys.path.insert(0, str(ROOT))
SOURCE_DIRS = ("limitgroups", "scripts", "tests")

CORE_MODULES = [
    "limitgroups.main",
    "limitgroups.router",
    "limitgroups.services.words",
    "limitgroups.services.tree",
    "limitgroups.services.baumslag",
    "limitgroups.services.symbolic",
    "limitgroups.services.surface",
    "limitgroups.services.construct",
    "limitgroups.services.targets",
    "limitgroups.services.experiments",
]

# Small, seeded runs; each one is executed twice and must print the same bytes.
SMOKE_RUNS = [
    ["padic", "freepair", "--length", "4"],
    ["surface", "onset", "--radius", "1", "--certified"],
    ["surface", "twist-audit", "--samples", "20", "--length", "5"],
    ["residual", "f2xf2", "--cap", "1"],
]


def _cli(argv: List[str]) -> subprocess.CompletedProcess[str]:
    return subprocess.run(
        [sys.executable, "-m", "limitgroups.main", *argv],
        cwd=str(ROOT),
        capture_output=True,
        text=True,
    )


def bump_version(current_version: str, major: bool = False) -> str:
    """MAJOR.MINOR; the minor part rolls over into the major one at 10."""
    try:
        major_part, minor_part = (int(x) for x in current_version.strip().split("."))
    except ValueError:
        raise SystemExit(f"Invalid version format: {current_version} (expected MAJOR.MINOR)") from None
    if major:
        return f"{major_part + 1}.0"
    minor_part += 1
    if minor_part >= 10:
        return f"{major_part + 1}.0"
    return f"{major_part}.{minor_part}"


def cmd_bump(args: argparse.Namespace) -> int:
    version_file = ROOT / "VERSION.txt"
    if not version_file.exists():
        print(f"VERSION.txt not found: {version_file}")
        return 1
    current = version_file.read_text(encoding="utf-8").strip()
    new_version = bump_version(current, major=args.major)
    version_file.write_text(new_version + "\n", encoding="utf-8")
    print(f"Version bumped: {current} -> {new_version}")
    print("Remember to bump the module tags in limitgroups/utils/versioning.py whose output changed.")
    return 0


def _compile_failures() -> List[str]:
    failures = []
    for folder in SOURCE_DIRS:
        for path in sorted((ROOT / folder).rglob("*.py")):
            try:
                py_compile.compile(str(path), doraise=True)
            except py_compile.PyCompileError as exc:
                failures.append(f"{path.relative_to(ROOT)}: {exc.msg}")
    return failures


def _import_failures() -> List[str]:
    failures = []
    for module in CORE_MODULES:
        try:
            importlib.import_module(module)
        except Exception as exc:  # noqa: BLE001
            failures.append(f"{module}: {exc}")
    return failures


def _wiring_failures() -> List[str]:
    """Every parser leaf has a route, and every configured cap is usable."""
    from limitgroups.main import build_parser
    from limitgroups.models.report import ExperimentConfig
    from limitgroups.router import get_routes

    failures = []
    parser = build_parser()
    groups = next(a for a in parser._actions if isinstance(a, argparse._SubParsersAction))
    leaves = set()
    for group, group_parser in groups.choices.items():
        actions = next(a for a in group_parser._actions if isinstance(a, argparse._SubParsersAction))
        leaves.update(f"{group} {action}" for action in actions.choices)
    routes = set(get_routes())
    failures += [f"no route for {leaf!r}" for leaf in sorted(leaves - routes)]
    failures += [f"route {key!r} has no command" for key in sorted(routes - leaves)]
    try:
        ExperimentConfig("health")
    except ValueError as exc:
        failures.append(f"config: {exc}")
    return failures


def cmd_health(_args: argparse.Namespace) -> int:
    failures = _compile_failures()
    imports = _import_failures()
    failures += imports
    if not imports:
        failures += _wiring_failures()
    if failures:
        print("Healthcheck failed:")
        for item in failures:
            print(f"- {item}")
        return 1
    print("Healthcheck passed.")
    return 0


def _smoke_run(argv: List[str]) -> Tuple[bool, str]:
    first, second = _cli(argv), _cli(argv)
    if first.returncode != 0:
        return False, f"exited {first.returncode}\n{first.stderr.strip()}"
    if first.stdout != second.stdout:
        return False, "two runs with the same seed printed different reports"
    try:
        report = json.loads(first.stdout)
    except json.JSONDecodeError as exc:
        return False, f"did not print a JSON report: {exc}"
    return True, f"{report['summary'].get('rows', 0)} rows, deterministic"


def cmd_smoke(_args: argparse.Namespace) -> int:
    ok = True
    construct = importlib.import_module("limitgroups.services.construct")
    broken = [entry.name for entry in construct.catalog() if not entry.replay()]
    if broken:
        print(f"[SMOKE] catalog witnesses do not replay: {', '.join(broken)}")
        ok = False
    for argv in SMOKE_RUNS:
        passed, detail = _smoke_run(argv)
        print(f"[SMOKE] {' '.join(argv[:2])}: {detail}")
        ok &= passed
    print("[SMOKE] PASS" if ok else "[SMOKE] FAIL")
    return 0 if ok else 1


def cmd_test(args: argparse.Namespace) -> int:
    cmd = [sys.executable, "-m", "pytest", args.target, "-q"]
    if not args.slow:
        cmd += ["-m", "not slow"]
    if args.k:
        cmd += ["-k", args.k]
    return subprocess.run(cmd, cwd=str(ROOT)).returncode


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(description="limitgroups maintenance toolbox")
    sub = parser.add_subparsers(dest="command", required=True)

    p_bump = sub.add_parser("bump", help="Bump VERSION.txt")
    p_bump.add_argument("--major", action="store_true", help="Start the next major version")
    p_bump.set_defaults(func=cmd_bump)

    p_health = sub.add_parser("health", help="Compile, import and routing checks")
    p_health.set_defaults(func=cmd_health)

    p_smoke = sub.add_parser("smoke", help="Catalog replay and repeated seeded CLI runs")
    p_smoke.set_defaults(func=cmd_smoke)

    p_test = sub.add_parser("test", help="Run pytest (slow tests skipped unless --slow)")
    p_test.add_argument("--target", default="tests")
    p_test.add_argument("--slow", action="store_true")
    p_test.add_argument("-k", default=None, help="pytest -k expression")
    p_test.set_defaults(func=cmd_test)

    return parser


def main() -> int:
    args = build_parser().parse_args()
    return args.func(args)


if __name__ == "__main__":
    raise SystemExit(main())
