"""`critspectra rmt-baseline`: sampled Wishart references."""

import argparse
import logging

import numpy as np

from critspectra.config import settings
from critspectra.constants import DENSITY_COLUMNS, EXIT_OK, SPECTRUM_COLUMNS
from critspectra.handlers.common import RunContext, output_argument
from critspectra.services.rmt import average_histograms, emerging_moments, sample_emerging_spectra

logger = logging.getLogger(__name__)


def rmt_baseline_command(args: argparse.Namespace) -> int:
    """Emerging-spectrum density of power-mapped Wishart matrices."""
    parameters = {
        "dim": args.dim,
        "tau": args.tau,
        "q": args.q,
        "replicas": args.replicas,
        "bins": args.bins,
    }
    run = RunContext.open(args, "rmt-baseline", args.seed, baseline=parameters)

    spectra = sample_emerging_spectra(args.dim, args.tau, args.q, args.replicas, args.seed, args.jobs)
    density = average_histograms(spectra, args.bins)
    mean, second = emerging_moments(spectra)
    negatives = sum(int(np.count_nonzero(values < 0)) for values in spectra)
    meta = {
        "dim": args.dim,
        "tau": args.tau,
        "q": args.q,
        "replicas": args.replicas,
        "negatives": negatives,
    }

    run.output.table(
        "emerging_density.csv",
        DENSITY_COLUMNS,
        [density.bin_centers, density.densities],
        model="WISHART",
        meta=meta,
    )
    pooled = np.sort(np.concatenate(spectra))[::-1]
    run.output.table(
        "emerging.csv",
        SPECTRUM_COLUMNS,
        [np.arange(1, pooled.size + 1), pooled],
        model="WISHART",
        meta=meta,
    )

    run.finish({"emerging_mean": mean, "emerging_second_moment": second, "negatives": negatives})
    logger.info(
        "Wishart baseline D=%d tau=%d q=%.6g mean=%.4g negatives=%d",
        args.dim,
        args.tau,
        args.q,
        mean,
        negatives,
    )
    return EXIT_OK


def register(subparsers: argparse._SubParsersAction) -> None:
    parser = subparsers.add_parser("rmt-baseline", help="power-mapped Wishart emerging spectra")
    parser.add_argument("--dim", type=int, required=True, help="matrix dimension D")
    parser.add_argument("--tau", type=int, required=True, help="series length (below D)")
    parser.add_argument("--q", type=float, default=1.001, help="power-map exponent")
    parser.add_argument(
        "--replicas",
        type=int,
        default=settings.emerging_replicas,
        help="independent Wishart samples",
    )
    parser.add_argument("--seed", type=int, default=0, help="manifest seed")
    parser.add_argument("--bins", type=int, help="histogram bins (default: square-root rule)")
    output_argument(parser)
    parser.set_defaults(handler=rmt_baseline_command)
