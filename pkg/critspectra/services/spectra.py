"""Eigenvalue spectra of symmetric matrices and their one- and two-point observables."""

import logging
import math
import warnings
from collections.abc import Sequence
from dataclasses import dataclass
from typing import Literal

import numpy as np
import scipy.linalg
from numpy.polynomial import Polynomial

from critspectra.config import settings
from critspectra.constants import (
    MIN_POLYNOMIAL_UNFOLD_POINTS,
    NUMBER_VARIANCE_MAX_FRACTION,
    RANK_TOLERANCE,
    SPACING_WARN_RANGE,
    SYMMETRY_TOLERANCE,
    UNFOLD_POLYNOMIAL_ORDER,
    UNFOLD_TRIM_FRACTION,
)
from critspectra.errors import DomainError, FitError, InsufficientDataError, NumericalError
from critspectra.services.correlation import CorrelationMatrix, build_correlation, standardize
from critspectra.services.ising import TimeSeriesMatrix

logger = logging.getLogger(__name__)

UnfoldMethod = Literal["mp", "polynomial"]


@dataclass(frozen=True)
class Spectrum:
    """Eigenvalues sorted in decreasing order."""

    values: np.ndarray
    source_dim: int
    source_tau: int | None = None

    @classmethod
    def from_values(
        cls,
        values: np.ndarray | Sequence[float],
        source_dim: int | None = None,
        source_tau: int | None = None,
    ) -> "Spectrum":
        ordered = np.sort(np.asarray(values, dtype=np.float64))[::-1].copy()
        ordered.setflags(write=False)
        return cls(
            values=ordered,
            source_dim=len(ordered) if source_dim is None else source_dim,
            source_tau=source_tau,
        )

    def __len__(self) -> int:
        return len(self.values)


@dataclass(frozen=True)
class SplitSpectrum:
    """Bulk and emerging parts of a power-mapped singular spectrum."""

    bulk: Spectrum
    emerging: Spectrum
    gap: float

    @property
    def reliable(self) -> bool:
        """A positive gap certifies that the two sets are separated."""
        return self.gap > 0


@dataclass(frozen=True)
class DensityEstimate:
    """Normalized histogram."""

    bin_edges: np.ndarray
    densities: np.ndarray
    sample_count: int

    @property
    def bin_centers(self) -> np.ndarray:
        return 0.5 * (self.bin_edges[1:] + self.bin_edges[:-1])

    @property
    def bin_widths(self) -> np.ndarray:
        return np.diff(self.bin_edges)

    def integral(self) -> float:
        return math.fsum(self.densities * self.bin_widths)


@dataclass(frozen=True)
class ZipfSeries:
    """1-based ranks against eigenvalues, positive part only."""

    ranks: np.ndarray
    values: np.ndarray
    overflow: np.ndarray

    def pairs(self) -> list[tuple[int, float]]:
        return [(int(n), float(value)) for n, value in zip(self.ranks, self.values)]


def _as_array(matrix: CorrelationMatrix | np.ndarray) -> np.ndarray:
    if isinstance(matrix, CorrelationMatrix):
        return matrix.entries
    array = np.asarray(matrix, dtype=np.float64)
    if array.ndim != 2 or array.shape[0] != array.shape[1]:
        raise DomainError("eigendecomposition needs a square matrix")
    scale = max(1.0, float(np.max(np.abs(array)))) if array.size else 1.0
    if np.max(np.abs(array - array.T), initial=0.0) > SYMMETRY_TOLERANCE * scale:
        raise DomainError("matrix is not symmetric")
    return array


def eigenvalues_symmetric(matrix: CorrelationMatrix | np.ndarray) -> Spectrum:
    """All real eigenvalues of a symmetric matrix, sorted decreasing.

    Raises:
        DomainError: If the input is not symmetric within 1e-12 max-norm.
    """
    if isinstance(matrix, CorrelationMatrix):
        # Fortran-ordered scratch copy the solver may overwrite
        array = matrix.to_dense().T
        values = scipy.linalg.eigvalsh(array, overwrite_a=True, check_finite=True)
    else:
        array = _as_array(matrix)
        values = scipy.linalg.eigvalsh(array, check_finite=True)
    tau = matrix.tau if isinstance(matrix, CorrelationMatrix) else None
    return Spectrum.from_values(values, source_dim=array.shape[0], source_tau=tau)


def eigenpairs_symmetric(matrix: CorrelationMatrix | np.ndarray) -> tuple[Spectrum, np.ndarray]:
    """Eigenvalues (decreasing) and matching eigenvectors as columns."""
    array = _as_array(matrix)
    values, vectors = scipy.linalg.eigh(array, check_finite=True)
    order = np.argsort(values)[::-1]
    tau = matrix.tau if isinstance(matrix, CorrelationMatrix) else None
    spectrum = Spectrum.from_values(values, source_dim=array.shape[0], source_tau=tau)
    return spectrum, vectors[:, order]


def temporal_spectrum(series: TimeSeriesMatrix) -> Spectrum:
    """Eigenvalues of the tau x tau temporal Gram matrix of the standardized data."""
    standardized, _ = standardize(series)
    gram = standardized.T @ standardized / series.tau
    values = scipy.linalg.eigvalsh(gram)
    return Spectrum.from_values(values, source_dim=series.tau, source_tau=series.n_series)


def spectrum_from_series(series: TimeSeriesMatrix, gram_ratio: float | None = None) -> Spectrum:
    """Spectrum of the Pearson matrix of a series, via the temporal Gram matrix when tau is short.

    Both routes share their nonzero eigenvalues; zero-variance sites add one
    eigenvalue 1 each (their row and column are a unit vector).
    """
    ratio = settings.gram_ratio if gram_ratio is None else gram_ratio
    dim = series.n_series
    if series.tau < 2:
        raise InsufficientDataError(f"correlations need tau >= 2, got {series.tau}")
    if series.tau >= ratio * dim:
        return eigenvalues_symmetric(build_correlation(series))

    _, degenerate = standardize(series)
    n_degenerate = int(degenerate.sum())
    live = dim - n_degenerate
    # At most min(live, tau) Gram eigenvalues can be nonzero
    kept = temporal_spectrum(series).values[:live]
    values = np.concatenate([kept, np.ones(n_degenerate), np.zeros(live - kept.size)])
    return Spectrum.from_values(values, source_dim=dim, source_tau=series.tau)


def measured_rank(spectrum: Spectrum) -> int:
    """Number of eigenvalues above 1e-8 D."""
    return int(np.count_nonzero(spectrum.values > RANK_TOLERANCE * spectrum.source_dim))


def check_correlation_spectrum(spectrum: Spectrum) -> None:
    """Trace identity and positive semidefiniteness of an unmapped correlation spectrum.

    Raises:
        NumericalError: If either check fails at 1e-8 D.
    """
    dim = spectrum.source_dim
    tolerance = RANK_TOLERANCE * dim
    trace = math.fsum(spectrum.values)
    if abs(trace - dim) > tolerance:
        raise NumericalError(f"eigenvalue sum {trace:.12g} differs from D={dim}")
    smallest = float(spectrum.values[-1])
    if smallest < -tolerance:
        raise NumericalError(f"smallest eigenvalue {smallest:.3g} is below -1e-8 D")


def zipf_series(spectrum: Spectrum) -> ZipfSeries:
    """Rank-ordered (n, lambda_n) pairs; non-positive eigenvalues go to overflow."""
    values = spectrum.values
    ranks = np.arange(1, values.size + 1)
    positive = values > 0
    return ZipfSeries(ranks=ranks[positive], values=values[positive], overflow=values[~positive])


def split_emerging(spectrum: Spectrum, tau_measured: int) -> SplitSpectrum:
    """Separate the D - tau smallest-magnitude eigenvalues (emerging) from the bulk.

    Raises:
        DomainError: If tau_measured is outside [1, D).
    """
    dim = len(spectrum)
    if not 1 <= tau_measured < dim:
        raise DomainError(f"nothing to split: measured rank {tau_measured} with D={dim}")

    order = np.argsort(-np.abs(spectrum.values), kind="stable")
    bulk = spectrum.values[order[:tau_measured]]
    emerging = spectrum.values[order[tau_measured:]]
    gap = float(np.min(np.abs(bulk)) - np.max(np.abs(emerging)))
    if gap <= 0:
        logger.warning("Emerging spectrum overlaps the bulk gap=%.3g", gap)

    return SplitSpectrum(
        bulk=Spectrum.from_values(bulk, source_tau=spectrum.source_tau),
        emerging=Spectrum.from_values(emerging, source_tau=spectrum.source_tau),
        gap=gap,
    )


def density_histogram(
    values: Spectrum | np.ndarray | Sequence[float],
    bins: int | np.ndarray | Sequence[float] | None = None,
) -> DensityEstimate:
    """Normalized histogram; square-root rule for the bin count by default.

    Raises:
        DomainError: If there are no samples.
    """
    samples = np.asarray(values.values if isinstance(values, Spectrum) else values, dtype=np.float64)
    if samples.size == 0:
        raise DomainError("cannot estimate a density from an empty spectrum")
    if bins is None:
        bins = max(1, math.ceil(math.sqrt(samples.size)))
    densities, edges = np.histogram(samples, bins=bins, density=True)
    return DensityEstimate(bin_edges=edges, densities=densities, sample_count=int(samples.size))


def _polynomial_staircase(ordered: np.ndarray, order: int) -> np.ndarray:
    if ordered.size < MIN_POLYNOMIAL_UNFOLD_POINTS:
        raise InsufficientDataError(
            f"polynomial unfolding needs at least {MIN_POLYNOMIAL_UNFOLD_POINTS} eigenvalues"
        )
    if np.unique(ordered).size <= order:
        raise FitError(f"staircase fit of order {order} is singular for this spectrum")

    staircase = np.arange(1, ordered.size + 1, dtype=np.float64)
    with warnings.catch_warnings():
        warnings.simplefilter("error", np.exceptions.RankWarning)
        try:
            smooth = Polynomial.fit(ordered, staircase, deg=order)
        except (np.linalg.LinAlgError, np.exceptions.RankWarning) as exc:
            raise FitError(f"staircase fit of order {order} failed: {exc}") from exc
    return smooth(ordered)


def unfold(
    spectrum: Spectrum | np.ndarray | Sequence[float],
    method: UnfoldMethod = "polynomial",
    *,
    kappa: float | None = None,
    order: int = UNFOLD_POLYNOMIAL_ORDER,
    trim: float = UNFOLD_TRIM_FRACTION,
) -> np.ndarray:
    """Map eigenvalues through the smooth counting function and trim both edges.

    `mp` uses N * F_MP(lambda) with kappa = D/tau (taken from the spectrum when
    not given); `polynomial` fits the empirical staircase.

    Raises:
        DomainError: For an unknown method or a missing kappa.
        FitError: If the staircase fit is singular.
    """
    if isinstance(spectrum, Spectrum):
        ordered = np.sort(spectrum.values)
        if kappa is None and spectrum.source_tau:
            kappa = spectrum.source_dim / spectrum.source_tau
    else:
        ordered = np.sort(np.asarray(spectrum, dtype=np.float64))

    if method == "mp":
        from critspectra.models import MPParams
        from critspectra.services.rmt import mp_cdf

        if kappa is None:
            raise DomainError("MP unfolding needs kappa = D/tau")
        counted = ordered.size * mp_cdf(ordered, MPParams(kappa=kappa))
    elif method == "polynomial":
        counted = _polynomial_staircase(ordered, order)
    else:
        raise DomainError(f"unknown unfolding method: {method}")

    cut = int(math.floor(trim * ordered.size))
    return np.sort(counted[cut : ordered.size - cut])


def nearest_spacings(unfolded: np.ndarray | Sequence[float]) -> np.ndarray:
    """Consecutive differences of the sorted unfolded sequence."""
    points = np.sort(np.asarray(unfolded, dtype=np.float64))
    if points.size < 2:
        raise InsufficientDataError("spacings need at least 2 points")
    return np.diff(points)


def spacing_distribution(
    unfolded: np.ndarray | Sequence[float],
    bins: int | np.ndarray | Sequence[float] | None = None,
) -> DensityEstimate:
    """Histogram P(S) of nearest-neighbour spacings."""
    spacings = nearest_spacings(unfolded)
    mean = float(spacings.mean())
    low, high = SPACING_WARN_RANGE
    if not low <= mean <= high:
        logger.warning("Unfolded mean spacing outside [%.1f, %.1f] mean=%.4f", low, high, mean)
    return density_histogram(spacings, bins)


def _window_variance(points: np.ndarray, r: float) -> float:
    starts = np.arange(points[0], points[-1] - r, r / 4.0)
    if starts.size < 2:
        raise DomainError(f"r={r} leaves fewer than two windows")
    counts = np.searchsorted(points, starts + r, side="left") - np.searchsorted(
        points, starts, side="left"
    )
    return float(np.var(counts, ddof=1))


def number_variance(
    unfolded: np.ndarray | Sequence[np.ndarray],
    r_values: Sequence[float],
) -> list[tuple[float, float]]:
    """Sigma^2(r): variance of counts in sliding windows of length r (stride r/4).

    Several unfolded sequences may be given as a list; per-sequence variances
    are averaged.

    Raises:
        DomainError: If r exceeds a tenth of a sequence's range.
    """
    if len(unfolded) == 0:
        raise InsufficientDataError("no unfolded eigenvalues given")
    if np.ndim(unfolded[0]) == 0:
        sequences = [np.asarray(unfolded, dtype=np.float64)]
    else:
        sequences = [np.asarray(member, dtype=np.float64) for member in unfolded]

    ordered = [np.sort(member) for member in sequences]
    results = []
    for r in r_values:
        if r <= 0:
            raise DomainError(f"window length must be positive, got {r}")
        variances = []
        for points in ordered:
            span = points[-1] - points[0]
            if r > NUMBER_VARIANCE_MAX_FRACTION * span:
                raise DomainError(f"r={r} too large for a sequence of range {span:.3g}")
            variances.append(_window_variance(points, r))
        results.append((float(r), math.fsum(variances) / len(variances)))
    return results
