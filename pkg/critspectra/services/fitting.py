"""Power-law exponents of Zipf series and the exponent-vs-size study."""

import logging
import math
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np
from scipy import stats

from critspectra.constants import FIT_WINDOW_DIVISORS, MIN_FIT_POINTS
from critspectra.errors import CritSpectraError, DomainError, FitError, PipelineError
from critspectra.models import PowerLawFit, SimConfig, SizeExponent, StudyConfig, SubsampleSpec
from critspectra.services import seeding
from critspectra.services.correlation import subsample_sites
from critspectra.services.ising import simulate
from critspectra.services.parallel import run_parallel
from critspectra.services.spectra import Spectrum, ZipfSeries, spectrum_from_series

logger = logging.getLogger(__name__)

ZipfInput = ZipfSeries | Spectrum | Sequence[tuple[int, float]]


@dataclass(frozen=True)
class PipelineRun:
    """One simulate-correlate-decompose-fit run."""

    lattice_size: int
    seed: int
    fit: PowerLawFit
    spectrum: Spectrum


def default_window(count: int) -> tuple[int, int]:
    """[N/400, N/40] rounded, starting at rank 2 and holding at least 5 ranks.

    Rank 1 is the uniform (magnetization) mode and never enters the default
    window. Small spectra widen n_max to keep MIN_FIT_POINTS ranks; the result
    is clipped to N.
    """
    low_divisor, high_divisor = FIT_WINDOW_DIVISORS
    n_min = max(2, round(count / low_divisor))
    n_max = min(count, max(round(count / high_divisor), n_min + MIN_FIT_POINTS - 1))
    return min(n_min, max(1, n_max)), max(1, n_max)


def _rank_value_arrays(zipf: ZipfInput) -> tuple[np.ndarray, np.ndarray]:
    if isinstance(zipf, Spectrum):
        values = zipf.values
        return np.arange(1, values.size + 1), values
    if isinstance(zipf, ZipfSeries):
        tail = np.arange(zipf.values.size + 1, zipf.values.size + zipf.overflow.size + 1)
        return np.concatenate([zipf.ranks, tail]), np.concatenate([zipf.values, zipf.overflow])
    pairs = np.asarray(zipf, dtype=np.float64).reshape(-1, 2)
    return pairs[:, 0].astype(np.int64), pairs[:, 1]


def fit_power_law(zipf: ZipfInput, window: tuple[int, int]) -> PowerLawFit:
    """OLS of ln(lambda_n) against ln(n) over n_min <= n <= n_max.

    Non-positive eigenvalues inside the window are dropped and counted.

    Raises:
        DomainError: If the window is empty or inverted.
        FitError: If fewer than 5 usable points remain.
    """
    n_min, n_max = window
    if n_min < 1 or n_max < n_min:
        raise DomainError(f"invalid fit window [{n_min}, {n_max}]")

    ranks, values = _rank_value_arrays(zipf)
    n_max = min(n_max, int(ranks.max(initial=0)))
    selected = (ranks >= n_min) & (ranks <= n_max)
    usable = selected & (values > 0)
    excluded = int(np.count_nonzero(selected & ~usable))
    if excluded:
        logger.warning("Excluded non-positive eigenvalues from fit count=%d", excluded)

    count = int(np.count_nonzero(usable))
    if count < MIN_FIT_POINTS:
        raise FitError(f"only {count} usable points in window [{n_min}, {n_max}], need {MIN_FIT_POINTS}")

    log_n = np.log(ranks[usable].astype(np.float64))
    log_values = np.log(values[usable])
    result = stats.linregress(log_n, log_values)
    residuals = log_values - (result.intercept + result.slope * log_n)
    rmse = math.sqrt(math.fsum(residuals * residuals) / count)

    return PowerLawFit(
        zeta=-float(result.slope),
        log_prefactor=float(result.intercept),
        n_min=n_min,
        n_max=n_max,
        rmse=rmse,
        point_count=count,
        excluded_count=excluded,
    )


def fit_pipeline_run(
    config: SimConfig,
    window: tuple[int, int] | None = None,
    subsample_fraction: float | None = None,
) -> PipelineRun:
    """Simulate, correlate (optionally on a random site subset), decompose and fit.

    Raises:
        PipelineError: Wrapping any toolkit error with (L, seed).
    """
    try:
        series = simulate(config)
        if subsample_fraction is not None:
            series = subsample_sites(
                series, SubsampleSpec(fraction=subsample_fraction, seed=config.seed)
            )
        spectrum = spectrum_from_series(series)
        fit = fit_power_law(spectrum, window or default_window(len(spectrum)))
    except PipelineError:
        raise
    except CritSpectraError as exc:
        raise PipelineError(config.lattice_size, config.seed, exc) from exc

    logger.info(
        "Pipeline run L=%d seed=%d zeta=%.4f rmse=%.4g",
        config.lattice_size,
        config.seed,
        fit.zeta,
        fit.rmse,
    )
    return PipelineRun(lattice_size=config.lattice_size, seed=config.seed, fit=fit, spectrum=spectrum)


def _pipeline_task(task: tuple[SimConfig, tuple[int, int] | None, float | None]) -> PipelineRun:
    config, window, fraction = task
    return fit_pipeline_run(config, window, fraction)


def _size_config(template: SimConfig, size: int, seed: int, multiple: float | None) -> SimConfig:
    update: dict[str, int] = {"lattice_size": size, "seed": seed}
    if multiple is not None:
        update["tau"] = max(2, round(multiple * size * size))
    return template.model_copy(update=update)


def study_seeds(seed: int, runs: int) -> list[int]:
    """Per-run seeds of a study, shared by every lattice size."""
    return [seeding.derive_seed(seed, "study", index) for index in range(runs)]


def summarize_runs(lattice_size: int, runs: Sequence[PipelineRun]) -> SizeExponent:
    """Mean exponent and its standard error over seeds."""
    zetas = np.array([run.fit.zeta for run in runs])
    stderr = float(zetas.std(ddof=1) / math.sqrt(zetas.size)) if zetas.size > 1 else 0.0
    return SizeExponent(
        lattice_size=lattice_size,
        zeta=math.fsum(zetas) / zetas.size,
        stderr=stderr,
        n_min=runs[0].fit.n_min,
        n_max=runs[0].fit.n_max,
        rmse=math.fsum(run.fit.rmse for run in runs) / len(runs),
        seeds=[run.seed for run in runs],
        fits=[run.fit for run in runs],
    )


def exponent_vs_size(
    study: StudyConfig | Sequence[int],
    template: SimConfig,
    runs_per_size: int | None = None,
    jobs: int | None = None,
) -> tuple[list[SizeExponent], list[PipelineRun]]:
    """Run the full pipeline for every (L, seed) pair and aggregate per size.

    The study window, when set, applies to every size; otherwise each size
    uses [N/400, N/40] of its own dimension.

    Returns:
        (one SizeExponent per size in input order, every individual run)
    """
    if isinstance(study, StudyConfig):
        sizes, window, fraction = study.sizes, study.window, study.subsample_fraction
        multiple = study.tau_multiple
        runs = study.runs_per_size if runs_per_size is None else runs_per_size
    else:
        sizes, window, fraction = list(study), None, None
        multiple = None
        runs = 1 if runs_per_size is None else runs_per_size
    if not sizes:
        raise DomainError("study needs at least one lattice size")

    seeds = study_seeds(template.seed, runs)
    tasks = [
        (_size_config(template, size, seed, multiple), window, fraction)
        for size in sizes
        for seed in seeds
    ]
    results = run_parallel(_pipeline_task, tasks, jobs)

    summaries = [
        summarize_runs(size, results[k * runs : (k + 1) * runs]) for k, size in enumerate(sizes)
    ]
    return summaries, results
