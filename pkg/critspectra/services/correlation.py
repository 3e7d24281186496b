"""Pearson correlation matrices, random site subsampling and the power map."""

import logging
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from critspectra.constants import ENTRY_TOLERANCE
from critspectra.errors import DomainError, InsufficientDataError
from critspectra.models import PowerMapParams, SubsampleSpec
from critspectra.services import seeding
from critspectra.services.ising import TimeSeriesMatrix

logger = logging.getLogger(__name__)

# Time steps converted to float64 at once while accumulating moments
_TIME_BLOCK = 4096
# Rows of the product matrix centred per step
_ROW_BLOCK = 1024


@dataclass(frozen=True)
class CorrelationMatrix:
    """Symmetric D x D matrix stored as its packed upper triangle."""

    dim: int
    triangle: np.ndarray
    tau: int | None = None
    degenerate_sites: tuple[int, ...] = ()
    site_indices: np.ndarray | None = None
    power: float | None = None

    def __post_init__(self) -> None:
        expected = self.dim * (self.dim + 1) // 2
        if self.triangle.shape != (expected,):
            raise DomainError(f"packed triangle of a {self.dim}x{self.dim} matrix has {expected} entries")
        self.triangle.setflags(write=False)

    @classmethod
    def from_dense(
        cls,
        entries: np.ndarray,
        *,
        tau: int | None = None,
        degenerate_sites: tuple[int, ...] = (),
        site_indices: np.ndarray | None = None,
        power: float | None = None,
    ) -> "CorrelationMatrix":
        """Pack the upper triangle of a square array."""
        entries = np.asarray(entries, dtype=np.float64)
        if entries.ndim != 2 or entries.shape[0] != entries.shape[1]:
            raise DomainError("correlation matrix must be square")
        return cls(
            dim=entries.shape[0],
            triangle=_pack_upper(entries),
            tau=tau,
            degenerate_sites=degenerate_sites,
            site_indices=site_indices,
            power=power,
        )

    def to_dense(self) -> np.ndarray:
        """A fresh writable symmetric array."""
        dense = np.empty((self.dim, self.dim), dtype=np.float64)
        offset = 0
        for row in range(self.dim):
            length = self.dim - row
            values = self.triangle[offset : offset + length]
            dense[row, row:] = values
            dense[row:, row] = values
            offset += length
        return dense

    @cached_property
    def entries(self) -> np.ndarray:
        """Materialized symmetric array (read-only)."""
        dense = self.to_dense()
        dense.setflags(write=False)
        return dense

    @property
    def rank_bound(self) -> int:
        """min(D, tau) recorded at construction."""
        if self.tau is None:
            return self.dim
        return min(self.dim, self.tau)

    @property
    def is_power_mapped(self) -> bool:
        return self.power is not None and self.power != 1.0

    def check_entries(self) -> None:
        """Unit diagonal on non-degenerate rows and entries within [-1, 1]."""
        if np.any(np.abs(self.triangle) > 1.0 + ENTRY_TOLERANCE):
            raise DomainError("correlation entries must lie in [-1, 1]")
        rows = np.arange(self.dim)
        diagonal = self.triangle[rows * self.dim - rows * (rows - 1) // 2]
        if not np.allclose(diagonal, 1.0, rtol=0, atol=ENTRY_TOLERANCE):
            raise DomainError("correlation matrix must have a unit diagonal")


def _pearson_exact(data: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Covariance numerators of integer-valued series from integer moment sums.

    Every moment is an integer below 2**53, so float64 accumulation is exact in
    any order and each entry depends only on its own two rows. The numerator
    tau * sum(x y) - sum(x) sum(y) is formed in place in the product matrix.
    """
    count, tau = data.shape
    sums = np.zeros(count)
    squares = np.zeros(count)
    products = np.zeros((count, count))
    for start in range(0, tau, _TIME_BLOCK):
        block = data[:, start : start + _TIME_BLOCK].astype(np.float64)
        sums += block.sum(axis=1)
        squares += np.einsum("ij,ij->i", block, block)
        products += block @ block.T
    products *= tau
    for start in range(0, count, _ROW_BLOCK):
        stop = start + _ROW_BLOCK
        products[start:stop] -= np.outer(sums[start:stop], sums)
    variances = tau * squares - sums * sums
    return products, variances


def _pearson_centered(data: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Covariance numerators of real-valued series from mean-subtracted rows."""
    values = data.astype(np.float64)
    values -= values.mean(axis=1, keepdims=True)
    variances = np.einsum("ij,ij->i", values, values)
    return values @ values.T, variances


def _pack_upper(entries: np.ndarray) -> np.ndarray:
    """Row-major upper triangle (diagonal included) of a square array."""
    dim = entries.shape[0]
    triangle = np.empty(dim * (dim + 1) // 2)
    offset = 0
    for row in range(dim):
        length = dim - row
        triangle[offset : offset + length] = entries[row, row:]
        offset += length
    return triangle


def standardize(series: TimeSeriesMatrix) -> tuple[np.ndarray, np.ndarray]:
    """Rows with zero mean and unit population variance; degenerate rows are zero.

    Returns:
        (standardized N x tau array, boolean mask of degenerate rows)
    """
    values = series.data.astype(np.float64)
    centered = values - values.mean(axis=1, keepdims=True)
    deviations = np.sqrt(np.einsum("ij,ij->i", centered, centered) / series.tau)
    degenerate = deviations == 0
    scale = np.where(degenerate, 1.0, deviations)
    standardized = centered / scale[:, None]
    standardized[degenerate] = 0.0
    return standardized, degenerate


def build_correlation(series: TimeSeriesMatrix) -> CorrelationMatrix:
    """Pearson correlation matrix (population convention) of the rows of a series.

    Zero-variance rows keep diagonal 1 and zero off-diagonals and are listed in
    `degenerate_sites`.

    Raises:
        InsufficientDataError: If fewer than two time steps are recorded.
    """
    if series.tau < 2:
        raise InsufficientDataError(f"correlations need tau >= 2, got {series.tau}")

    if np.issubdtype(series.data.dtype, np.integer):
        numerator, variances = _pearson_exact(series.data)
    else:
        numerator, variances = _pearson_centered(series.data)

    degenerate = variances <= 0
    scale = 1.0 / np.sqrt(np.where(degenerate, 1.0, variances))
    numerator *= scale[:, None]
    numerator *= scale[None, :]
    numerator[degenerate, :] = 0.0
    numerator[:, degenerate] = 0.0
    np.clip(numerator, -1.0, 1.0, out=numerator)
    np.fill_diagonal(numerator, 1.0)
    triangle = _pack_upper(numerator)
    del numerator

    degenerate_sites = tuple(int(site) for site in series.site_indices[degenerate])
    if degenerate_sites:
        logger.warning("Zero-variance series count=%d", len(degenerate_sites))

    return CorrelationMatrix(
        dim=series.n_series,
        triangle=triangle,
        tau=series.tau,
        degenerate_sites=degenerate_sites,
        site_indices=series.site_indices.copy(),
    )


def subsample_sites(series: TimeSeriesMatrix, spec: SubsampleSpec) -> TimeSeriesMatrix:
    """k rows chosen uniformly without replacement, kept in their original order.

    Raises:
        DomainError: If more rows are requested than the series holds.
    """
    count = spec.resolve_count(series.n_series)
    if count > series.n_series:
        raise DomainError(f"cannot choose {count} series out of {series.n_series}")
    if count == series.n_series:
        return series

    rng = seeding.generator(spec.seed, "subsample")
    chosen = np.sort(rng.choice(series.n_series, size=count, replace=False))
    return TimeSeriesMatrix(
        data=series.data[chosen],
        site_indices=series.site_indices[chosen],
        lattice_size=series.lattice_size,
        seed=series.seed,
    )


def truncate_series(series: TimeSeriesMatrix, tau: int) -> TimeSeriesMatrix:
    """Keep the first tau recorded time steps."""
    if not 1 <= tau <= series.tau:
        raise DomainError(f"tau window {tau} outside [1, {series.tau}]")
    return TimeSeriesMatrix(
        data=series.data[:, :tau],
        site_indices=series.site_indices,
        lattice_size=series.lattice_size,
        seed=series.seed,
    )


def power_map(matrix: CorrelationMatrix, params: PowerMapParams) -> CorrelationMatrix:
    """Entrywise sgn(C)|C|^q; zeros and the unit diagonal are fixed points.

    Raises:
        DomainError: If q is not positive.
    """
    q = params.q
    if not q > 0:
        raise DomainError(f"power map exponent must be positive, got {q}")

    if q == 1.0:
        mapped = matrix.triangle.copy()
    else:
        mapped = np.sign(matrix.triangle) * np.abs(matrix.triangle) ** q

    previous = 1.0 if matrix.power is None else matrix.power
    return CorrelationMatrix(
        dim=matrix.dim,
        triangle=mapped,
        tau=matrix.tau,
        degenerate_sites=matrix.degenerate_sites,
        site_indices=matrix.site_indices,
        power=previous * q,
    )
