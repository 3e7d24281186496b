"""`critspectra spectrum`: spectral observables of a recorded time series."""

import argparse
import logging
from pathlib import Path

import numpy as np

from critspectra.config import settings
from critspectra.constants import (
    DEFAULT_OBSERVABLES,
    DEFAULT_SIGMA2_R,
    DENSITY_COLUMNS,
    DENSITY_OVERLAY_COLUMNS,
    EXIT_OK,
    MIN_RELIABLE_FIT_POINTS,
    OBSERVABLES,
    SIGMA2_COLUMNS,
    SIGMA2_OVERLAY_COLUMNS,
    SPACING_COLUMNS,
    SPACING_OVERLAY_COLUMNS,
    SPECTRUM_COLUMNS,
    ZIPF_COLUMNS,
    ZIPF_OVERLAY_COLUMNS,
)
from critspectra.errors import ConfigError
from critspectra.handlers.common import (
    RunContext,
    output_argument,
    resolve_count,
    validate_option,
    write_fit,
)
from critspectra.models import MPParams, PowerMapParams, SubsampleSpec
from critspectra.services import seeding
from critspectra.services.correlation import (
    build_correlation,
    power_map,
    subsample_sites,
    truncate_series,
)
from critspectra.services.fitting import default_window, fit_power_law
from critspectra.services.pipeline import emerging_from_matrix
from critspectra.services.rmt import (
    mp_density,
    mp_zipf_curve,
    number_variance_baseline,
    wigner_surmise,
)
from critspectra.services.spectra import (
    Spectrum,
    check_correlation_spectrum,
    density_histogram,
    eigenvalues_symmetric,
    number_variance,
    spacing_distribution,
    spectrum_from_series,
    unfold,
    zipf_series,
)
from critspectra.storage import (
    OutputDirectory,
    read_sidecar,
    read_time_series,
    sha256_file,
    sidecar_path,
    write_matrix,
)

logger = logging.getLogger(__name__)


def parse_observables(text: str) -> tuple[str, ...]:
    """Comma-separated observable names, validated against the known set."""
    names = tuple(item.strip() for item in text.split(",") if item.strip())
    for name in names:
        if name not in OBSERVABLES:
            raise ConfigError(
                f"unknown observable '{name}' (known: {', '.join(OBSERVABLES)})",
                field="observables",
            )
    return names


def choose_unfolding(requested: str, input_meta: dict[str, str]) -> str:
    """Resolve `auto` to MP unfolding at high temperature, polynomial otherwise."""
    if requested != "auto":
        return requested
    threshold = settings.high_temperature_beta2j
    beta2j = input_meta.get("beta2j")
    if threshold is not None and beta2j is not None and float(beta2j) <= threshold:
        return "mp"
    return "polynomial"


def spectrum_command(args: argparse.Namespace) -> int:
    """Compute the requested observables of a time-series dump."""
    observables = parse_observables(args.observables)
    if "emerging" in observables and args.power_map is None:
        raise ConfigError("the emerging spectrum needs --power-map q", field="power-map")

    series = read_time_series(args.input)
    input_meta = read_sidecar(args.input) if sidecar_path(args.input).exists() else {}
    seed = args.seed if args.seed is not None else series.seed

    options: dict[str, object] = {
        "observables": list(observables),
        "mp_overlay": args.mp_overlay,
        "unfold": args.unfold,
        "bins": args.bins,
        "window": args.window,
        "r": args.r,
        "replicas": args.replicas,
        "save_matrix": args.save_matrix,
    }
    if args.subsample is not None:
        count = resolve_count(args.subsample, series.n_series, "subsample")
        spec = validate_option(SubsampleSpec, "subsample", count=count, seed=seed)
        series = subsample_sites(series, spec)
        options["subsample"] = spec.model_dump()
    if args.tau_window is not None:
        tau = resolve_count(args.tau_window, series.n_series, "tau-window")
        series = truncate_series(series, tau)
        options["tau_window"] = tau
    if args.power_map is not None:
        options["power_map"] = validate_option(PowerMapParams, "power-map", q=args.power_map).q

    run = RunContext.open(
        args,
        "spectrum",
        seed,
        input={
            "path": Path(args.input).name,
            "sha256": sha256_file(args.input),
            "beta2j": input_meta.get("beta2j"),
        },
        options=options,
    )
    output = run.output
    dim, tau = series.n_series, series.tau
    meta = {"dim": dim, "tau": tau}

    matrix = unmapped = None
    if args.power_map is not None or args.save_matrix or "emerging" in observables:
        matrix = unmapped = build_correlation(series)
        base = eigenvalues_symmetric(matrix)
    else:
        base = spectrum_from_series(series)
    check_correlation_spectrum(base)

    spectrum = base
    if args.power_map is not None:
        matrix = power_map(matrix, PowerMapParams(q=args.power_map))
        spectrum = eigenvalues_symmetric(matrix)
        meta["q"] = args.power_map
    if args.save_matrix:
        with output.artifact("matrix.cscm", binary=True, model="ISING", meta=meta) as handle:
            write_matrix(handle, matrix)

    mp = MPParams(kappa=dim / tau)
    if "zipf" in observables:
        _write_zipf(output, spectrum, mp if args.mp_overlay else None, meta)
    if "density" in observables:
        _write_density(output, spectrum, args.bins, mp if args.mp_overlay else None, meta)
    if "spacing" in observables or "sigma2" in observables:
        method = choose_unfolding(args.unfold, input_meta)
        unfolded = unfold(spectrum, method, kappa=mp.kappa)
        unfold_meta = {**meta, "unfold": method}
        if "spacing" in observables:
            _write_spacing(output, unfolded, args.bins, args.mp_overlay, unfold_meta)
        if "sigma2" in observables:
            baseline = None
            if args.mp_overlay:
                baseline = number_variance_baseline(
                    dim,
                    tau,
                    args.r,
                    args.replicas,
                    seeding.derive_seed(seed or 0, "sigma2-baseline"),
                    method=method,
                    jobs=args.jobs,
                )
            _write_sigma2(output, number_variance(unfolded, args.r), baseline, unfold_meta)
    if "emerging" in observables:
        split, rank = emerging_from_matrix(unmapped, args.power_map)
        emerging = split.emerging.values
        emerging_meta = {**meta, "measured_rank": rank, "gap": repr(split.gap)}
        output.table(
            "emerging.csv",
            SPECTRUM_COLUMNS,
            [np.arange(1, emerging.size + 1), emerging],
            model="ISING",
            meta=emerging_meta,
        )
        _write_density(
            output, split.emerging, args.bins, None, emerging_meta, "emerging_density.csv"
        )
        logger.info(
            "Emerging spectrum count=%d negatives=%d gap=%.3g",
            emerging.size,
            int(np.count_nonzero(emerging < 0)),
            split.gap,
        )
    if "fit" in observables:
        window = tuple(args.window) if args.window else default_window(len(spectrum))
        fit = fit_power_law(zipf_series(spectrum), window)
        if fit.point_count < MIN_RELIABLE_FIT_POINTS:
            logger.warning("Fit window holds few points count=%d", fit.point_count)
        write_fit(output, fit, "ISING", meta)

    run.finish()
    return EXIT_OK


def _write_zipf(
    output: OutputDirectory, spectrum: Spectrum, mp: MPParams | None, meta: dict
) -> None:
    zipf = zipf_series(spectrum)
    if mp is None:
        output.table("zipf.csv", ZIPF_COLUMNS, [zipf.ranks, zipf.values], model="ISING", meta=meta)
        return
    reference = mp_zipf_curve(mp, len(spectrum))[zipf.ranks - 1]
    output.table(
        "zipf.csv",
        ZIPF_OVERLAY_COLUMNS,
        [zipf.ranks, zipf.values, reference],
        model="ISING",
        meta={**meta, "reference": "MP"},
    )


def _write_density(
    output: OutputDirectory,
    spectrum: Spectrum,
    bins: int | None,
    mp: MPParams | None,
    meta: dict,
    name: str = "density.csv",
) -> None:
    density = density_histogram(spectrum, bins)
    if mp is None:
        columns = [density.bin_centers, density.densities]
        output.table(name, DENSITY_COLUMNS, columns, model="ISING", meta=meta)
        return
    output.table(
        name,
        DENSITY_OVERLAY_COLUMNS,
        [density.bin_centers, density.densities, mp_density(density.bin_centers, mp)],
        model="ISING",
        meta={**meta, "reference": "MP", "mp_point_mass": mp.point_mass},
    )


def _write_spacing(
    output: OutputDirectory, unfolded: np.ndarray, bins: int | None, overlay: bool, meta: dict
) -> None:
    density = spacing_distribution(unfolded, bins)
    if not overlay:
        columns = [density.bin_centers, density.densities]
        output.table("spacing.csv", SPACING_COLUMNS, columns, model="ISING", meta=meta)
        return
    output.table(
        "spacing.csv",
        SPACING_OVERLAY_COLUMNS,
        [density.bin_centers, density.densities, wigner_surmise(density.bin_centers)],
        model="ISING",
        meta={**meta, "reference": "WIGNER"},
    )


def _write_sigma2(output: OutputDirectory, sigma2: list, baseline: list | None, meta: dict) -> None:
    rows = np.array(sigma2)
    if baseline is None:
        output.table("sigma2.csv", SIGMA2_COLUMNS, rows, model="ISING", meta=meta)
        return
    output.table(
        "sigma2.csv",
        SIGMA2_OVERLAY_COLUMNS,
        np.column_stack([rows, np.array(baseline)[:, 1]]),
        model="ISING",
        meta={**meta, "reference": "WISHART"},
    )


def register(subparsers: argparse._SubParsersAction) -> None:
    parser = subparsers.add_parser("spectrum", help="spectral observables of a time-series dump")
    parser.add_argument("input", help="time-series dump written by `simulate`")
    parser.add_argument(
        "--observables",
        default=",".join(DEFAULT_OBSERVABLES),
        help=f"comma-separated subset of {', '.join(OBSERVABLES)}",
    )
    parser.add_argument("--subsample", help="random sites to keep: fraction (0.25, N/4) or count")
    parser.add_argument("--seed", type=int, help="seed for subsampling and baselines (default: dump seed)")
    parser.add_argument("--tau-window", help="keep the first tau steps: count or fraction of N (N/4)")
    parser.add_argument("--power-map", type=float, help="entrywise power-map exponent q")
    parser.add_argument("--mp-overlay", action="store_true", help="add RMT reference columns")
    parser.add_argument(
        "--unfold",
        choices=("auto", "mp", "polynomial"),
        default="auto",
        help="unfolding for spacing and sigma2 (auto: MP at high temperature)",
    )
    parser.add_argument("--bins", type=int, help="histogram bins (default: square-root rule)")
    parser.add_argument("--window", type=int, nargs=2, metavar=("N_MIN", "N_MAX"), help="fit window")
    parser.add_argument(
        "--r",
        type=float,
        nargs="+",
        default=list(DEFAULT_SIGMA2_R),
        help="window lengths for the number variance",
    )
    parser.add_argument(
        "--replicas",
        type=int,
        default=settings.emerging_replicas,
        help="Wishart replicas for the sigma2 baseline",
    )
    parser.add_argument("--save-matrix", action="store_true", help="persist the (mapped) matrix")
    output_argument(parser)
    parser.set_defaults(handler=spectrum_command)
