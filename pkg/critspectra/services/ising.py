"""Metropolis dynamics of the 2-D Ising model on a periodic square lattice."""

import logging
import math
import time
from dataclasses import dataclass

import numpy as np
from numba import njit

from critspectra.config import settings
from critspectra.constants import CRITICAL_COUPLING_RATIO
from critspectra.errors import CapacityError, DomainError
from critspectra.models import SimConfig
from critspectra.services import seeding

logger = logging.getLogger(__name__)

# Energy changes of a single flip in units of J: 2 * sigma * (sum of 4 neighbours)
_DELTA_LEVELS = np.array([-8, -4, 0, 4, 8], dtype=np.int64)
_BOND_BLOCK = 256


@dataclass
class SpinLattice:
    """L x L grid of +-1 spins with periodic boundaries and its random stream."""

    size: int
    spins: np.ndarray
    rng: np.random.Generator

    def __post_init__(self) -> None:
        if self.size < 2:
            raise DomainError(f"lattice side must be at least 2, got {self.size}")
        spins = np.ascontiguousarray(self.spins, dtype=np.int8)
        if spins.shape != (self.size, self.size):
            raise DomainError(f"spins must have shape ({self.size}, {self.size})")
        if not np.all(np.abs(spins) == 1):
            raise DomainError("every spin must be exactly -1 or +1")
        self.spins = spins

    @classmethod
    def random(cls, size: int, rng: np.random.Generator) -> "SpinLattice":
        """Infinite-temperature start: independent uniform spins."""
        spins = rng.integers(0, 2, size=(size, size), dtype=np.int8) * 2 - 1
        return cls(size=size, spins=spins.astype(np.int8), rng=rng)

    @classmethod
    def uniform(cls, size: int, rng: np.random.Generator, value: int = 1) -> "SpinLattice":
        """All spins equal to `value`."""
        return cls(size=size, spins=np.full((size, size), value, dtype=np.int8), rng=rng)

    @property
    def site_count(self) -> int:
        return self.size * self.size

    def neighbour_sum(self, site: int) -> int:
        """Sum of the four periodic nearest neighbours of a flat site index."""
        row, col = divmod(site, self.size)
        size = self.size
        spins = self.spins
        return int(
            spins[(row + 1) % size, col]
            + spins[(row - 1) % size, col]
            + spins[row, (col + 1) % size]
            + spins[row, (col - 1) % size]
        )


@dataclass(frozen=True)
class TimeSeriesMatrix:
    """N recorded series (rows) of length tau (columns)."""

    data: np.ndarray
    site_indices: np.ndarray
    lattice_size: int | None = None
    seed: int | None = None

    def __post_init__(self) -> None:
        if self.data.ndim != 2:
            raise DomainError("time series data must be a 2-D array (N x tau)")
        if self.site_indices.shape != (self.data.shape[0],):
            raise DomainError("one site index is required per series")
        if np.unique(self.site_indices).size != self.site_indices.size:
            raise DomainError("site indices must be distinct")
        if self.lattice_size is not None and self.site_indices.size:
            upper = self.lattice_size**2
            if self.site_indices.min() < 0 or self.site_indices.max() >= upper:
                raise DomainError(f"site indices must lie in [0, {upper})")

    @classmethod
    def from_array(cls, data: np.ndarray, seed: int | None = None) -> "TimeSeriesMatrix":
        """Wrap a plain N x tau array; rows are numbered 0..N-1."""
        data = np.asarray(data)
        return cls(data=data, site_indices=np.arange(data.shape[0]), seed=seed)

    @property
    def n_series(self) -> int:
        return self.data.shape[0]

    @property
    def tau(self) -> int:
        return self.data.shape[1]

    @property
    def is_full_lattice(self) -> bool:
        return (
            self.lattice_size is not None
            and self.n_series == self.lattice_size**2
            and np.array_equal(self.site_indices, np.arange(self.n_series))
        )


@njit(cache=True)
def _metropolis_kernel(spins, size, sites, uniforms, acceptance):
    """Apply one proposal per (site, uniform) pair; returns the summed dE / J."""
    total = 0
    for k in range(sites.shape[0]):
        site = sites[k]
        row = site // size
        col = site - row * size
        up = ((row + size - 1) % size) * size + col
        down = ((row + 1) % size) * size + col
        left = row * size + (col + size - 1) % size
        right = row * size + (col + 1) % size
        neighbours = (
            np.int64(spins[up]) + np.int64(spins[down]) + np.int64(spins[left]) + np.int64(spins[right])
        )
        delta = 2 * np.int64(spins[site]) * neighbours
        if delta <= 0 or uniforms[k] < acceptance[delta // 4 + 2]:
            spins[site] = -spins[site]
            total += delta
    return total


def critical_temperature(coupling: float) -> float:
    """Onsager's T_c = 2J / ln(1 + sqrt 2).

    Raises:
        DomainError: If the coupling is not positive.
    """
    if not coupling > 0:
        raise DomainError(f"coupling J must be positive, got {coupling}")
    return CRITICAL_COUPLING_RATIO * coupling


def acceptance_table(beta2j: float) -> np.ndarray:
    """exp(-dE/T) for dE in {-8, -4, 0, 4, 8} J, capped at 1; T = 2J/beta2j."""
    if beta2j < 0:
        raise DomainError(f"beta2j must be non-negative, got {beta2j}")
    return np.minimum(1.0, np.exp(-_DELTA_LEVELS * (beta2j / 2.0)))


def total_energy(lattice: SpinLattice, coupling: float) -> float:
    """-J times the sum over the 2 L^2 nearest-neighbour bonds of the torus."""
    spins = lattice.spins.astype(np.int64)
    bonds = spins * np.roll(spins, -1, axis=0) + spins * np.roll(spins, -1, axis=1)
    return -coupling * float(bonds.sum())


def magnetization(lattice: SpinLattice) -> float:
    """Mean spin."""
    return float(lattice.spins.mean())


def metropolis_flip(
    lattice: SpinLattice,
    site: int,
    temperature: float,
    coupling: float = 1.0,
) -> bool:
    """Propose flipping one spin and accept with min(1, exp(-dU/T)).

    One uniform is drawn from the lattice stream for every proposal, accepted or
    not, so that sign-flipped lattices consume identical streams.
    """
    if not 0 <= site < lattice.site_count:
        raise DomainError(f"site {site} outside [0, {lattice.site_count})")
    if temperature < 0:
        raise DomainError(f"temperature must be non-negative, got {temperature}")

    row, col = divmod(site, lattice.size)
    spin = int(lattice.spins[row, col])
    delta_u = 2.0 * coupling * spin * lattice.neighbour_sum(site)
    uniform = lattice.rng.random()

    if delta_u <= 0:
        accepted = True
    elif math.isinf(temperature):
        accepted = True
    elif temperature == 0:
        accepted = False
    else:
        accepted = uniform < math.exp(-delta_u / temperature)

    if accepted:
        lattice.spins[row, col] = -spin
    return accepted


def advance(lattice: SpinLattice, beta2j: float, flips: int) -> int:
    """Run `flips` Metropolis proposals drawn from the lattice stream.

    Sites are drawn first (bounded integers), then one uniform per proposal.

    Returns:
        Accumulated energy change in units of J.
    """
    sites = lattice.rng.integers(0, lattice.site_count, size=flips, dtype=np.int64)
    uniforms = lattice.rng.random(flips)
    flat = lattice.spins.reshape(-1)
    return int(_metropolis_kernel(flat, lattice.size, sites, uniforms, acceptance_table(beta2j)))


def check_capacity(config: SimConfig, limit_bytes: int | None = None) -> None:
    """Raise CapacityError before allocating an oversize recording."""
    limit = settings.max_series_bytes if limit_bytes is None else limit_bytes
    # int8 recording plus one step of drawn sites (int64) and uniforms (float64)
    requested = config.site_count * config.tau + 16 * config.flips
    if requested > limit:
        raise CapacityError(requested, limit)


def simulate(config: SimConfig, limit_bytes: int | None = None) -> TimeSeriesMatrix:
    """Equilibrate, then record the full lattice after each of tau time steps.

    Deterministic given the config: the lattice stream is the "ising" child of
    the config seed.

    Raises:
        CapacityError: If the recording would exceed the configured ceiling.
    """
    check_capacity(config, limit_bytes)

    size = config.lattice_size
    flips = config.flips
    rng = seeding.generator(config.seed, "ising")
    lattice = SpinLattice.random(size, rng)

    started = time.perf_counter()
    for _ in range(config.equilibration_steps):
        advance(lattice, config.beta2j, flips)

    data = np.empty((config.site_count, config.tau), dtype=np.int8)
    for step in range(config.tau):
        advance(lattice, config.beta2j, flips)
        data[:, step] = lattice.spins.reshape(-1)

    elapsed = time.perf_counter() - started
    total_steps = config.equilibration_steps + config.tau
    logger.info(
        "Simulation finished L=%d beta2j=%.6g steps=%d steps_per_second=%.1f",
        size,
        config.beta2j,
        total_steps,
        total_steps / elapsed if elapsed > 0 else float("inf"),
    )
    return TimeSeriesMatrix(
        data=data,
        site_indices=np.arange(config.site_count),
        lattice_size=size,
        seed=config.seed,
    )


def mean_bond_product(series: TimeSeriesMatrix) -> float:
    """Average nearest-neighbour product sigma_i sigma_j over a recorded full lattice."""
    if not series.is_full_lattice:
        raise DomainError("bond products need the full, unpermuted lattice")
    size = series.lattice_size
    frames = series.data.reshape(size, size, series.tau)
    total = 0
    for start in range(0, series.tau, _BOND_BLOCK):
        block = frames[:, :, start : start + _BOND_BLOCK].astype(np.int32)
        bonds = block * np.roll(block, -1, axis=0) + block * np.roll(block, -1, axis=1)
        total += int(bonds.sum(dtype=np.int64))
    return total / (2.0 * series.n_series * series.tau)
