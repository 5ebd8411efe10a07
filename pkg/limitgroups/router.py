from __future__ import annotations

import logging
from typing import Callable, Dict

from limitgroups.models.report import ExperimentConfig, Report
from limitgroups.services.errors import UnknownNameError
from limitgroups.services.experiments import (
    run_baumslag_certify,
    run_baumslag_sweep,
    run_double_scan,
    run_padic_freepair,
    run_padic_hk,
    run_padic_surject,
    run_residual_f2xf2,
    run_surface_onset,
    run_surface_twist_audit,
)

logger = logging.getLogger("LIMITGROUPS")

Pipeline = Callable[[ExperimentConfig], Report]


def get_routes() -> Dict[str, Pipeline]:
    """Command key ``"<group> <action>"`` to pipeline."""
    return {
        "baumslag certify": run_baumslag_certify,
        "baumslag sweep": run_baumslag_sweep,
        "surface onset": run_surface_onset,
        "surface twist-audit": run_surface_twist_audit,
        "double scan": run_double_scan,
        "residual f2xf2": run_residual_f2xf2,
        "padic hk": run_padic_hk,
        "padic surject": run_padic_surject,
        "padic freepair": run_padic_freepair,
    }


def resolve_route(command: str) -> Pipeline:
    routes = get_routes()
    if command not in routes:
        raise UnknownNameError(f"unknown command {command!r}; expected one of {sorted(routes)}")
    return routes[command]


def run(config: ExperimentConfig) -> Report:
    pipeline = resolve_route(config.command)
    logger.info("Running %s (seed %s)", config.command, config.seed)
    report = pipeline(config)
    logger.info("Finished %s: %s rows, %s failures", config.command, len(report.rows), report.failures)
    return report
