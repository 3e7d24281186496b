"""Emerging-spectrum runs on simulated series and the temperature / tau scan."""

import logging
from dataclasses import dataclass

import numpy as np

from critspectra.errors import DomainError
from critspectra.models import EmergingScanConfig, PowerMapParams, SimConfig
from critspectra.services import seeding
from critspectra.services.correlation import (
    CorrelationMatrix,
    build_correlation,
    power_map,
    truncate_series,
)
from critspectra.services.ising import TimeSeriesMatrix, simulate
from critspectra.services.parallel import run_parallel
from critspectra.services.rmt import average_histograms, rmt_emerging_baseline
from critspectra.services.spectra import (
    DensityEstimate,
    SplitSpectrum,
    eigenvalues_symmetric,
    measured_rank,
    split_emerging,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class EmergingScanEntry:
    """Replica-averaged emerging density of one (temperature, tau) cell and its Wishart baseline."""

    beta2j: float
    tau_fraction: float
    tau: int
    splits: tuple[SplitSpectrum, ...]
    density: DensityEstimate
    baseline: DensityEstimate

    @property
    def negative_count(self) -> int:
        """Negative emerging eigenvalues summed over replicas."""
        return sum(int(np.count_nonzero(split.emerging.values < 0)) for split in self.splits)

    @property
    def replicas_with_negatives(self) -> int:
        return sum(bool(np.any(split.emerging.values < 0)) for split in self.splits)

    @property
    def min_gap(self) -> float:
        return min(split.gap for split in self.splits)


def emerging_from_matrix(matrix: CorrelationMatrix, q: float) -> tuple[SplitSpectrum, int]:
    """Power-map a singular Pearson matrix and split off its emerging part.

    Returns:
        (split spectrum, measured rank of the unmapped matrix)

    Raises:
        DomainError: If tau >= D, where the matrix is not singular.
    """
    if matrix.tau is None or matrix.tau >= matrix.dim:
        raise DomainError(
            f"emerging spectrum needs a singular matrix: tau={matrix.tau} must be below "
            f"D={matrix.dim} (shorten the series with a tau window)"
        )
    rank = measured_rank(eigenvalues_symmetric(matrix))
    mapped = eigenvalues_symmetric(power_map(matrix, PowerMapParams(q=q)))
    return split_emerging(mapped, rank), rank


def emerging_from_series(series: TimeSeriesMatrix, q: float) -> tuple[SplitSpectrum, int]:
    """`emerging_from_matrix` on the Pearson matrix of a series."""
    return emerging_from_matrix(build_correlation(series), q)


def _scan_replica(
    task: tuple[SimConfig, EmergingScanConfig],
) -> list[tuple[float, int, SplitSpectrum]]:
    config, scan = task
    series = simulate(config)
    cells = []
    for fraction in scan.tau_fractions:
        tau = max(2, round(fraction * series.n_series))
        split, _ = emerging_from_series(truncate_series(series, tau), scan.q)
        cells.append((fraction, tau, split))
    return cells


def emerging_scan(
    template: SimConfig,
    scan: EmergingScanConfig,
    jobs: int | None = None,
) -> list[EmergingScanEntry]:
    """Emerging densities for every (beta2j, tau fraction) pair of the scan.

    Each temperature is simulated `scan.replicas` times with derived seeds.
    One simulation records just enough steps for the longest tau window;
    shorter windows are prefixes of it. Cell densities average the replica
    histograms on shared edges.
    """
    sites = template.site_count
    longest = max(max(2, round(fraction * sites)) for fraction in scan.tau_fractions)
    tasks = [
        (
            template.model_copy(
                update={
                    "beta2j": beta2j,
                    "tau": longest,
                    "seed": seeding.derive_seed(template.seed, "emerging", replica),
                }
            ),
            scan,
        )
        for beta2j in scan.beta2j
        for replica in range(scan.replicas)
    ]
    per_run = run_parallel(_scan_replica, tasks, jobs)

    baselines: dict[int, DensityEstimate] = {}
    entries = []
    for k, beta2j in enumerate(scan.beta2j):
        replicas = per_run[k * scan.replicas : (k + 1) * scan.replicas]
        for column, fraction in enumerate(scan.tau_fractions):
            tau = replicas[0][column][1]
            splits = tuple(cells[column][2] for cells in replicas)
            if tau not in baselines:
                baselines[tau] = rmt_emerging_baseline(
                    sites,
                    tau,
                    scan.q,
                    scan.replicas,
                    seeding.derive_seed(template.seed, "baseline", tau),
                    bins=scan.bins,
                    jobs=jobs,
                )
            entry = EmergingScanEntry(
                beta2j=beta2j,
                tau_fraction=fraction,
                tau=tau,
                splits=splits,
                density=average_histograms([split.emerging.values for split in splits], scan.bins),
                baseline=baselines[tau],
            )
            logger.info(
                "Emerging cell beta2j=%.6g tau=%d replicas=%d negatives=%d min_gap=%.3g",
                beta2j,
                tau,
                len(splits),
                entry.negative_count,
                entry.min_gap,
            )
            entries.append(entry)
    return entries
