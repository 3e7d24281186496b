"""`critspectra study`: Zipf exponent against lattice size."""

import argparse
import logging

import numpy as np

from critspectra.config import parse_section, read_run_config, settings
from critspectra.constants import EXIT_OK, STUDY_COLUMNS, ZIPF_COLUMNS
from critspectra.handlers.common import RunContext, output_argument
from critspectra.models import SimConfig, StudyConfig
from critspectra.services.fitting import exponent_vs_size
from critspectra.services.ising import check_capacity
from critspectra.services.spectra import zipf_series

logger = logging.getLogger(__name__)


def study_command(args: argparse.Namespace) -> int:
    """Run the [study] sweep over the [simulation] template."""
    sections = read_run_config(args.config)
    study = parse_section(sections, "study", StudyConfig)
    defaults = {
        "equilibration_steps": settings.equilibration_steps,
        "lattice_size": study.sizes[0],
    }
    if study.tau_multiple is not None:
        defaults["tau"] = max(2, round(study.tau_multiple * study.sizes[0] ** 2))
    template = parse_section(sections, "simulation", SimConfig, defaults=defaults)
    for size in study.sizes:
        tau = template.tau
        if study.tau_multiple is not None:
            tau = max(2, round(study.tau_multiple * size * size))
        check_capacity(template.model_copy(update={"lattice_size": size, "tau": tau}))

    run = RunContext.open(args, "study", template.seed, simulation=template, study=study)
    summaries, runs = exponent_vs_size(study, template, jobs=args.jobs)

    for result in runs:
        zipf = zipf_series(result.spectrum)
        run.output.table(
            f"zipf_L{result.lattice_size}_seed{result.seed}.csv",
            ZIPF_COLUMNS,
            [zipf.ranks, zipf.values],
            model="ISING",
            meta={"lattice_size": result.lattice_size, "run_seed": result.seed},
        )

    rows = np.array(
        [[s.lattice_size, s.zeta, s.stderr, s.n_min, s.n_max, s.rmse] for s in summaries]
    )
    meta = {"runs_per_size": study.runs_per_size}
    run.output.table("study.csv", STUDY_COLUMNS, rows, model="ISING", meta=meta)

    for summary in summaries:
        logger.info(
            "Study size L=%d zeta=%.4f stderr=%.4f rmse=%.4g",
            summary.lattice_size,
            summary.zeta,
            summary.stderr,
            summary.rmse,
        )
    run.finish({"sizes": [summary.model_dump() for summary in summaries]})
    return EXIT_OK


def register(subparsers: argparse._SubParsersAction) -> None:
    parser = subparsers.add_parser("study", help="exponent-vs-size study of a config file")
    parser.add_argument("config", help="run config with [simulation] and [study] sections")
    output_argument(parser)
    parser.set_defaults(handler=study_command)
