"""`critspectra oracle`: Zipf exponent of an exact circulant power-law matrix."""

import argparse
import logging

from pydantic import ValidationError

from critspectra.constants import EXIT_OK, MIN_FIT_POINTS, MIN_RELIABLE_FIT_POINTS, ZIPF_COLUMNS
from critspectra.errors import ConfigError
from critspectra.handlers.common import RunContext, output_argument, write_fit
from critspectra.models import CirculantSpec
from critspectra.services.fitting import default_window, fit_power_law
from critspectra.services.oracle import circulant_eigenvalues, theoretical_zeta
from critspectra.services.spectra import zipf_series

logger = logging.getLogger(__name__)


def oracle_command(args: argparse.Namespace) -> int:
    """Diagonalize the circulant by FFT, write its Zipf series and fit the exponent."""
    try:
        spec = CirculantSpec(
            dimension=args.dimension,
            size=args.size,
            theta=args.theta,
            prefactor=args.prefactor,
            zero_value=args.zero_value,
        )
    except ValidationError as exc:
        error = exc.errors()[0]
        raise ConfigError(error["msg"], field=str(error["loc"][0])) from exc

    run = RunContext.open(args, "oracle", None, circulant=spec)
    spectrum = circulant_eigenvalues(spec)
    zipf = zipf_series(spectrum)
    meta = {"dimension": spec.dimension, "size": spec.size, "theta": spec.theta}
    run.output.table("zipf.csv", ZIPF_COLUMNS, [zipf.ranks, zipf.values], model="CIRCULANT", meta=meta)

    expected = theoretical_zeta(spec.dimension, spec.theta)
    n_min, n_max = tuple(args.window) if args.window else default_window(spec.site_count)
    points = n_max - n_min + 1
    extra: dict[str, float | int | None] = {"theoretical_zeta": expected, "zeta": None}
    if points < MIN_RELIABLE_FIT_POINTS:
        logger.warning(
            "Window too small for a reliable fit window=[%d, %d] points=%d",
            n_min,
            n_max,
            points,
        )
    if points < MIN_FIT_POINTS:
        logger.warning("Skipping fit, fewer than %d points in window", MIN_FIT_POINTS)
    else:
        fit = fit_power_law(zipf, (n_min, n_max))
        write_fit(run.output, fit, "CIRCULANT", meta)
        extra["zeta"] = fit.zeta
        logger.info(
            "Oracle fit d=%d L=%d theta=%.4g zeta=%.4f expected=%.4f rmse=%.3g",
            spec.dimension,
            spec.size,
            spec.theta,
            fit.zeta,
            expected,
            fit.rmse,
        )

    run.finish(extra)
    return EXIT_OK


def register(subparsers: argparse._SubParsersAction) -> None:
    parser = subparsers.add_parser("oracle", help="FFT spectrum of a circulant power-law matrix")
    parser.add_argument("--dimension", "-d", type=int, required=True, choices=(1, 2))
    parser.add_argument("--size", "-L", type=int, required=True, help="torus side length")
    parser.add_argument("--theta", type=float, required=True, help="decay exponent")
    parser.add_argument("--prefactor", type=float, default=1.0, help="c in c |r|^-theta")
    parser.add_argument("--zero-value", type=float, default=1.0, help="value at zero separation")
    parser.add_argument("--window", type=int, nargs=2, metavar=("N_MIN", "N_MAX"), help="fit window")
    output_argument(parser)
    parser.set_defaults(handler=oracle_command)
