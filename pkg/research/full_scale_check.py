#!/usr/bin/env python3
"""
Full-scale critical exponent check

Runs the simulate-correlate-decompose-fit pipeline once at production size
(L = 192, tau = 5N, fit window [100, 1000]) and compares the fitted exponent
with the reference value. Expect hours of wall clock and a memory peak
near 24 GB: the 6.8 GB recording stays alive next to the 11 GB dense matrix
and its 5.4 GB packed triangle. Raise CRITSPECTRA_MAX_SERIES_BYTES above 7e9 before running.
"""

import json
import logging
import sys
import time
from pathlib import Path
from typing import Any

from pydantic_settings import BaseSettings, SettingsConfigDict

from critspectra.errors import CritSpectraError
from critspectra.main import setup_logging
from critspectra.models import SimConfig, SubsampleSpec
from critspectra.services.correlation import subsample_sites
from critspectra.services.fitting import fit_power_law
from critspectra.services.ising import mean_bond_product, simulate
from critspectra.services.spectra import spectrum_from_series

logger = logging.getLogger("research.full_scale_check")


class ResearchSettings(BaseSettings):
    """Parameters of the full-scale run."""

    lattice_size: int = 192
    tau_multiple: int = 5
    equilibration_steps: int = 10_000
    seed: int = 0
    window_min: int = 100
    window_max: int = 1000
    expected_zeta: float = 0.8504
    tolerance: float = 0.02
    subsample_fraction: float | None = 0.25
    output_file: str = "research/full_scale_results.json"

    model_config = SettingsConfigDict(
        env_prefix="CRITSPECTRA_RESEARCH_",
        env_file=".env",
        env_parse_none_str="none",
        extra="ignore",
    )


def run_check(settings: ResearchSettings) -> dict[str, Any]:
    """Run the pipeline once and collect the numbers worth keeping."""
    size = settings.lattice_size
    config = SimConfig(
        lattice_size=size,
        beta2j="critical",
        seed=settings.seed,
        equilibration_steps=settings.equilibration_steps,
        tau=settings.tau_multiple * size * size,
    )
    window = (settings.window_min, settings.window_max)

    started = time.perf_counter()
    series = simulate(config)
    simulated = time.perf_counter()
    spectrum = spectrum_from_series(series)
    fit = fit_power_law(spectrum, window)
    finished = time.perf_counter()

    subsample = None
    if settings.subsample_fraction is not None:
        subset = subsample_sites(
            series, SubsampleSpec(fraction=settings.subsample_fraction, seed=settings.seed)
        )
        sub_spectrum = spectrum_from_series(subset)
        subsample = fit_power_law(sub_spectrum, window).model_dump()

    deviation = fit.zeta - settings.expected_zeta
    return {
        "lattice_size": size,
        "tau": config.tau,
        "seed": config.seed,
        "bond_product": mean_bond_product(series),
        "fit": fit.model_dump(),
        "expected_zeta": settings.expected_zeta,
        "deviation": deviation,
        "within_tolerance": abs(deviation) <= settings.tolerance,
        "subsample_fit": subsample,
        "largest_eigenvalues": spectrum.values[:10].tolist(),
        "simulation_seconds": simulated - started,
        "spectrum_seconds": finished - simulated,
    }


def save_results(results: dict[str, Any], output_file: str) -> None:
    path = Path(output_file)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(results, indent=2, default=str) + "\n", encoding="utf-8")
    logger.info("Results saved path=%s", path)


def main() -> int:
    setup_logging()
    settings = ResearchSettings()
    logger.info(
        "Starting full-scale check L=%d tau_multiple=%d window=[%d, %d]",
        settings.lattice_size,
        settings.tau_multiple,
        settings.window_min,
        settings.window_max,
    )

    try:
        results = run_check(settings)
    except CritSpectraError as exc:
        logger.error("Full-scale check failed error_type=%s: %s", type(exc).__name__, exc.message)
        return exc.exit_code

    save_results(results, settings.output_file)
    fit = results["fit"]
    logger.info(
        "zeta=%.4f expected=%.4f deviation=%+.4f rmse=%.4g",
        fit["zeta"],
        settings.expected_zeta,
        results["deviation"],
        fit["rmse"],
    )
    if results["subsample_fit"] is not None:
        sub_fit = results["subsample_fit"]
        logger.info("Subsample zeta=%.4f rmse=%.4g", sub_fit["zeta"], sub_fit["rmse"])
    if not results["within_tolerance"]:
        logger.error("Exponent outside tolerance=%.3f", settings.tolerance)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
