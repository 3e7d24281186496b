"""Random-matrix null models: Marchenko-Pastur law, Wishart sampling and baselines."""

import logging
import math
from collections.abc import Sequence

import numpy as np
from scipy import integrate, optimize

from critspectra.constants import QUADRATURE_TOLERANCE
from critspectra.errors import DomainError
from critspectra.models import MPParams, PowerMapParams
from critspectra.services import seeding
from critspectra.services.correlation import CorrelationMatrix, build_correlation, power_map
from critspectra.services.ising import TimeSeriesMatrix
from critspectra.services.parallel import run_parallel
from critspectra.services.spectra import (
    DensityEstimate,
    UnfoldMethod,
    eigenvalues_symmetric,
    measured_rank,
    number_variance,
    split_emerging,
    unfold,
)

logger = logging.getLogger(__name__)


def mp_density(value: float | np.ndarray, params: MPParams) -> float | np.ndarray:
    """Continuous part of the MP density; zero outside [lambda-, lambda+].

    For kappa > 1 the point mass at zero is `params.point_mass` and is not
    included here.
    """
    lam = np.asarray(value, dtype=np.float64)
    low, high = params.lambda_minus, params.lambda_plus
    inside = (lam > low) & (lam < high) & (lam > 0)
    safe = np.where(inside, lam, 1.0)
    root = np.sqrt(np.clip((high - safe) * (safe - low), 0.0, None))
    density = np.where(inside, root / (2.0 * math.pi * params.kappa * params.scale * safe), 0.0)
    return float(density) if density.ndim == 0 else density


def _continuous_mass(low: float, high: float, params: MPParams) -> float:
    if high <= low:
        return 0.0
    mass, _ = integrate.quad(
        lambda x: float(mp_density(x, params)),
        low,
        high,
        epsabs=QUADRATURE_TOLERANCE,
        limit=200,
    )
    return mass


def mp_cdf(value: float | np.ndarray, params: MPParams) -> float | np.ndarray:
    """MP distribution function, point mass at zero included for kappa > 1.

    Array input is integrated piecewise between consecutive sorted points.
    """
    lam = np.asarray(value, dtype=np.float64)
    flat = lam.reshape(-1)
    order = np.argsort(flat)
    edges = np.clip(flat[order], params.lambda_minus, params.lambda_plus)

    pieces = np.empty(edges.size)
    previous = params.lambda_minus
    for k, edge in enumerate(edges):
        pieces[k] = _continuous_mass(previous, edge, params)
        previous = edge
    continuous = np.cumsum(pieces)

    atom = np.where(flat[order] >= 0, params.point_mass, 0.0)
    result = np.empty(flat.size)
    result[order] = np.minimum(continuous + atom, 1.0)
    result = result.reshape(lam.shape)
    return float(result) if result.ndim == 0 else result


def mp_counting(value: float | np.ndarray, params: MPParams, dim: int) -> float | np.ndarray:
    """Expected number of eigenvalues below `value`: N times the MP CDF."""
    if dim < 1:
        raise DomainError(f"dimension must be at least 1, got {dim}")
    return dim * mp_cdf(value, params)


def mp_zipf_curve(params: MPParams, dim: int) -> np.ndarray:
    """MP reference for a Zipf plot: lambda_n with N (1 - F(lambda_n)) = n - 1/2."""
    low, high = params.lambda_minus, params.lambda_plus
    curve = np.zeros(dim)
    for n in range(1, dim + 1):
        target = 1.0 - (n - 0.5) / dim
        if target <= params.point_mass:
            continue
        curve[n - 1] = optimize.brentq(
            lambda x, t=target: mp_cdf(x, params) - t,
            low,
            high,
            xtol=QUADRATURE_TOLERANCE,
        )
    return curve


def sample_wishart_correlation(dim: int, tau: int, seed: int, index: int = 0) -> CorrelationMatrix:
    """Pearson matrix of `dim` independent standard-normal series of length tau.

    Raises:
        DomainError: If D < 1 or tau < 2.
    """
    if dim < 1 or tau < 2:
        raise DomainError(
            f"Wishart sampling needs D >= 1 and tau >= 2 for a Pearson matrix, got D={dim} tau={tau}"
        )
    rng = seeding.generator(seed, "wishart", index)
    data = rng.standard_normal((dim, tau))
    return build_correlation(TimeSeriesMatrix.from_array(data, seed=seed))


def wigner_surmise(spacing: float | np.ndarray) -> float | np.ndarray:
    """Orthogonal-class surmise (pi/2) S exp(-pi S^2 / 4)."""
    s = np.asarray(spacing, dtype=np.float64)
    if np.any(s < 0):
        raise DomainError("spacings must be non-negative")
    density = 0.5 * math.pi * s * np.exp(-0.25 * math.pi * s * s)
    return float(density) if density.ndim == 0 else density


def _emerging_replica(task: tuple[int, int, float, int, int]) -> np.ndarray:
    dim, tau, q, seed, index = task
    matrix = sample_wishart_correlation(dim, tau, seed, index)
    rank = measured_rank(eigenvalues_symmetric(matrix))
    mapped = eigenvalues_symmetric(power_map(matrix, PowerMapParams(q=q)))
    return split_emerging(mapped, rank).emerging.values


def sample_emerging_spectra(
    dim: int,
    tau: int,
    q: float,
    replicas: int,
    seed: int,
    jobs: int | None = None,
) -> list[np.ndarray]:
    """Emerging eigenvalues of power-mapped Wishart matrices, one array per replica.

    Raises:
        DomainError: If tau >= D (no emerging spectrum).
    """
    if tau >= dim:
        raise DomainError(f"emerging spectra need tau < D, got tau={tau} D={dim}")
    if replicas < 1:
        raise DomainError(f"replicas must be at least 1, got {replicas}")
    tasks = [(dim, tau, q, seed, index) for index in range(replicas)]
    return run_parallel(_emerging_replica, tasks, jobs)


def average_histograms(
    samples: Sequence[np.ndarray],
    bins: int | np.ndarray | Sequence[float] | None = None,
) -> DensityEstimate:
    """Replica-averaged density on edges shared by all replicas."""
    pooled = np.concatenate([np.asarray(member, dtype=np.float64) for member in samples])
    if pooled.size == 0:
        raise DomainError("cannot estimate a density from empty replicas")
    if bins is None:
        bins = max(1, math.ceil(math.sqrt(pooled.size / len(samples))))
    edges = np.histogram_bin_edges(pooled, bins=bins)
    stack = np.array([np.histogram(member, bins=edges, density=True)[0] for member in samples])
    densities = np.array([math.fsum(column) for column in stack.T]) / len(samples)
    return DensityEstimate(bin_edges=edges, densities=densities, sample_count=int(pooled.size))


def rmt_emerging_baseline(
    dim: int,
    tau: int,
    q: float,
    replicas: int,
    seed: int,
    bins: int | np.ndarray | Sequence[float] | None = None,
    jobs: int | None = None,
) -> DensityEstimate:
    """Emerging-spectrum density of power-mapped Wishart matrices, averaged over replicas."""
    spectra = sample_emerging_spectra(dim, tau, q, replicas, seed, jobs)
    negatives = sum(int(np.count_nonzero(values < 0)) for values in spectra)
    logger.info(
        "Wishart emerging baseline D=%d tau=%d q=%.6g replicas=%d negatives=%d",
        dim,
        tau,
        q,
        replicas,
        negatives,
    )
    return average_histograms(spectra, bins)


def emerging_moments(values: np.ndarray | Sequence[np.ndarray]) -> tuple[float, float]:
    """First and second moments of the pooled emerging eigenvalues."""
    if isinstance(values, np.ndarray):
        pooled = values.reshape(-1)
    else:
        pooled = np.concatenate([np.asarray(member).reshape(-1) for member in values])
    if pooled.size == 0:
        raise DomainError("no emerging eigenvalues to average")
    mean = math.fsum(pooled) / pooled.size
    second = math.fsum(pooled * pooled) / pooled.size
    return mean, second


def _unfolded_replica(task: tuple[int, int, int, int, str]) -> np.ndarray:
    dim, tau, seed, index, method = task
    spectrum = eigenvalues_symmetric(sample_wishart_correlation(dim, tau, seed, index))
    return unfold(spectrum, method, kappa=dim / tau)


def number_variance_baseline(
    dim: int,
    tau: int,
    r_values: Sequence[float],
    replicas: int,
    seed: int,
    method: UnfoldMethod = "mp",
    jobs: int | None = None,
) -> list[tuple[float, float]]:
    """Sigma^2(r) of unfolded Wishart spectra at matched (D, tau)."""
    if tau < dim:
        raise DomainError(f"number variance baseline needs tau >= D, got tau={tau} D={dim}")
    if replicas < 1:
        raise DomainError(f"replicas must be at least 1, got {replicas}")
    tasks = [(dim, tau, seed, index, method) for index in range(replicas)]
    unfolded = run_parallel(_unfolded_replica, tasks, jobs)
    return number_variance(unfolded, r_values)
