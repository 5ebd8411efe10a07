"""Command-line entry point.

Usage::

    python -m limitgroups.main surface onset --r 1 --radius 2 --window 16 --certified
    python -m limitgroups.main --seed 7 --out report.json baumslag certify --instance inst.json
    python -m limitgroups.main padic freepair --a "1 2 0 1" --b "1 0 2 1" --length 8

Exit codes: 0 success, 1 usage or input error, 2 invariant failure.
"""
from __future__ import annotations

import argparse
import logging
import sys
from typing import List, Optional

from limitgroups.config.settings import AppConfig
from limitgroups.models.report import ExperimentConfig
from limitgroups.router import run
from limitgroups.services.errors import InvariantError
from limitgroups.services.storage import resolve_report_path, write_text_atomic

logger = logging.getLogger("LIMITGROUPS")

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_INVARIANT = 2

GLOBAL_KEYS = {"func", "group", "action", "out", "seed", "progress"}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # type: ignore[override]
        raise UsageError(message)


def _add_globals(parser: argparse.ArgumentParser, suppress: bool) -> None:
    default = argparse.SUPPRESS if suppress else None
    parser.add_argument(
        "--out",
        nargs="?",
        const="",
        default=default,
        help="Write the JSON report to PATH (default path under the reports directory when PATH is omitted)",
    )
    parser.add_argument(
        "--seed",
        type=int,
        default=argparse.SUPPRESS if suppress else AppConfig.DEFAULT_SEED,
        help="64-bit seed for every randomized step",
    )
    parser.add_argument(
        "--progress",
        action="store_true",
        default=argparse.SUPPRESS if suppress else False,
        help="Show progress bars on stderr",
    )


def _leaf(sub, name: str, help_text: str) -> argparse.ArgumentParser:
    parser = sub.add_parser(name, help=help_text)
    _add_globals(parser, suppress=True)
    return parser


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="limitgroups", description="Limit group experiments with JSON reports.")
    _add_globals(parser, suppress=False)
    groups = parser.add_subparsers(dest="group", required=True)

    baumslag = groups.add_parser("baumslag", help="Ping-pong certificates").add_subparsers(dest="action", required=True)
    for name, help_text in (("certify", "Certify and sample an instance"), ("sweep", "Empirical exponent sweep")):
        p = _leaf(baumslag, name, help_text)
        p.add_argument("--instance", required=True, help="Instance JSON file")
        p.add_argument("--relaxed", action="store_true", help="Use the relaxed hypotheses")
        if name == "certify":
            p.add_argument("--samples", type=int, default=1000)
            p.add_argument("--spread", type=int, default=20)
        else:
            p.add_argument("--window", type=int, default=3)
            p.add_argument("--cap", type=int, default=8)

    surface = groups.add_parser("surface", help="Genus 2r+1 surface group").add_subparsers(dest="action", required=True)
    p = _leaf(surface, "onset", "Onsets of f_n over a ball")
    p.add_argument("--r", type=int, default=1)
    p.add_argument("--radius", type=int, default=2)
    p.add_argument("--window", type=int, default=16)
    p.add_argument("--certified", action="store_true")
    p = _leaf(surface, "twist-audit", "Twist and fold identities on random words")
    p.add_argument("--r", type=int, default=1)
    p.add_argument("--samples", type=int, default=200)
    p.add_argument("--length", type=int, default=8)

    double = groups.add_parser("double", help="Doubles of free groups").add_subparsers(dest="action", required=True)
    p = _leaf(double, "scan", "Eventual faithfulness over reduced forms")
    p.add_argument("--c", default="[x1,x2]", help="Edge word")
    p.add_argument("--rank", type=int, default=None)
    p.add_argument("--kind", choices=["amalgam", "hnn"], default="amalgam")
    p.add_argument("--syllables", type=int, default=3)
    p.add_argument("--length", type=int, default=4)
    p.add_argument("--window", type=int, default=16)

    residual = groups.add_parser("residual", help="Residual freeness").add_subparsers(dest="action", required=True)
    p = _leaf(residual, "f2xf2", "F2 x F2 non-separability scan")
    p.add_argument("--w", default="x1")
    p.add_argument("--w-prime", dest="w_prime", default="x2")
    p.add_argument("--cap", type=int, default=2)

    padic = groups.add_parser("padic", help="SL2 targets").add_subparsers(dest="action", required=True)
    p = _leaf(padic, "hk", "h_k family in SL2(Z/p^k)")
    p.add_argument("--p", type=int, default=5)
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--double", default=None, help="DoubleSpec JSON file")
    p.add_argument("--report", dest="out", nargs="?", const="", default=argparse.SUPPRESS, help="Alias of --out")
    p.add_argument("--syllables", type=int, default=2)
    p.add_argument("--length", type=int, default=4)
    p = _leaf(padic, "surject", "Closure of generators")
    p.add_argument("--p", type=int, default=5)
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--gens", default=None, help="JSON file holding a list of four-integer rows")
    p = _leaf(padic, "freepair", "Exact free pair check in SL2(Z)")
    p.add_argument("--a", default="1 2 0 1")
    p.add_argument("--b", default="1 0 2 1")
    p.add_argument("--length", type=int, default=8)
    return parser


def config_from_args(args: argparse.Namespace) -> ExperimentConfig:
    params = {k: v for k, v in sorted(vars(args).items()) if k not in GLOBAL_KEYS}
    return ExperimentConfig(
        command=f"{args.group} {args.action}",
        seed=args.seed,
        out=args.out,
        progress=args.progress,
        params=params,
    )


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"limitgroups: error: {exc}", file=sys.stderr)
        return EXIT_USAGE

    try:
        config = config_from_args(args)
        report = run(config)
    except InvariantError as exc:
        logger.error("Invariant failure: %s", exc)
        return EXIT_INVARIANT
    except ValueError as exc:
        logger.error("%s", exc)
        return EXIT_USAGE

    text = report.to_json()
    if config.out is not None:
        try:
            path = write_text_atomic(resolve_report_path(config.out, config.command), text)
        except OSError as exc:
            logger.error("Could not write report: %s", exc)
            return EXIT_USAGE
        logger.info("Report written to %s", path)
    sys.stdout.write(text)
    return EXIT_INVARIANT if report.failures else EXIT_OK


if __name__ == "__main__":
    raise SystemExit(main())
