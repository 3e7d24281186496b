"""`critspectra emerging-scan`: emerging spectra across temperatures and tau windows."""

import argparse
import logging

from critspectra.config import parse_section
from critspectra.constants import DENSITY_COLUMNS, EXIT_OK
from critspectra.handlers.common import RunContext, load_simulation, output_argument
from critspectra.models import EmergingScanConfig
from critspectra.services.ising import check_capacity
from critspectra.services.pipeline import emerging_scan

logger = logging.getLogger(__name__)


def emerging_scan_command(args: argparse.Namespace) -> int:
    """One emerging density per (beta2j, tau fraction), plus a Wishart baseline per tau."""
    sections, template = load_simulation(args.config, {"tau": 2})
    scan = parse_section(sections, "emerging", EmergingScanConfig)
    longest = max(max(2, round(fraction * template.site_count)) for fraction in scan.tau_fractions)
    check_capacity(template.model_copy(update={"tau": longest}))

    run = RunContext.open(args, "emerging-scan", template.seed, simulation=template, emerging=scan)
    entries = emerging_scan(template, scan, jobs=args.jobs)

    written_baselines: set[int] = set()
    summary = []
    for index, entry in enumerate(entries):
        meta = {
            "beta2j": repr(entry.beta2j),
            "tau": entry.tau,
            "tau_fraction": repr(entry.tau_fraction),
            "q": scan.q,
            "negatives": entry.negative_count,
            "replicas": len(entry.splits),
            "replicas_with_negatives": entry.replicas_with_negatives,
            "min_gap": repr(entry.min_gap),
        }
        run.output.table(
            f"emerging_{index:02d}_tau{entry.tau}.csv",
            DENSITY_COLUMNS,
            [entry.density.bin_centers, entry.density.densities],
            model="ISING",
            meta=meta,
        )
        if entry.tau not in written_baselines:
            run.output.table(
                f"baseline_tau{entry.tau}.csv",
                DENSITY_COLUMNS,
                [entry.baseline.bin_centers, entry.baseline.densities],
                model="WISHART",
                meta={"tau": entry.tau, "q": scan.q, "replicas": scan.replicas},
            )
            written_baselines.add(entry.tau)
        summary.append(
            {
                "beta2j": entry.beta2j,
                "tau": entry.tau,
                "negatives": entry.negative_count,
                "replicas_with_negatives": entry.replicas_with_negatives,
            }
        )

    run.finish({"cells": summary})
    return EXIT_OK


def register(subparsers: argparse._SubParsersAction) -> None:
    parser = subparsers.add_parser(
        "emerging-scan", help="emerging spectra over temperatures and tau windows"
    )
    parser.add_argument("config", help="run config with [simulation] and [emerging] sections")
    output_argument(parser)
    parser.set_defaults(handler=emerging_scan_command)
