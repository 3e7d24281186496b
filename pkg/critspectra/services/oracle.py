"""Circulant power-law correlations on the torus, diagonalized by FFT."""

import logging

import numpy as np
import scipy.fft

from critspectra.constants import IMAGINARY_TOLERANCE
from critspectra.errors import DomainError, NumericalError
from critspectra.models import CirculantSpec
from critspectra.services.spectra import Spectrum

logger = logging.getLogger(__name__)


def _torus_distance(spec: CirculantSpec) -> np.ndarray:
    offsets = np.arange(spec.size)
    wrapped = np.minimum(offsets, spec.size - offsets).astype(np.float64)
    if spec.dimension == 1:
        return wrapped
    return np.hypot(wrapped[:, None], wrapped[None, :])


def circulant_kernel(spec: CirculantSpec) -> np.ndarray:
    """f(n) = c |n|^-theta with minimal-image distance; f(0) = zero_value."""
    distance = _torus_distance(spec)
    kernel = np.empty_like(distance)
    nonzero = distance > 0
    kernel[nonzero] = spec.prefactor * distance[nonzero] ** (-spec.theta)
    kernel[~nonzero] = spec.zero_value
    return kernel


def materialize_circulant(spec: CirculantSpec) -> np.ndarray:
    """Dense L^d x L^d matrix whose (n, m) entry is f(n - m) on the torus."""
    kernel = circulant_kernel(spec)
    size = spec.size
    if spec.dimension == 1:
        index = np.arange(size)
        return kernel[(index[:, None] - index[None, :]) % size]

    rows, cols = np.divmod(np.arange(size * size), size)
    drow = (rows[:, None] - rows[None, :]) % size
    dcol = (cols[:, None] - cols[None, :]) % size
    return kernel[drow, dcol]


def circulant_eigenvalues(spec: CirculantSpec) -> Spectrum:
    """d-dimensional DFT of the kernel, sorted decreasing.

    Raises:
        NumericalError: If the transform has a non-negligible imaginary part.
    """
    transform = scipy.fft.fftn(circulant_kernel(spec))
    magnitude = max(1.0, float(np.max(np.abs(transform.real))))
    imaginary = float(np.max(np.abs(transform.imag)))
    if imaginary > IMAGINARY_TOLERANCE * magnitude:
        raise NumericalError(f"circulant spectrum has imaginary part {imaginary:.3g}")
    return Spectrum.from_values(transform.real.reshape(-1))


def theoretical_zeta(dimension: int, theta: float) -> float:
    """(d - theta) / d.

    Raises:
        DomainError: Unless 0 < theta < d.
    """
    if dimension < 1:
        raise DomainError(f"dimension must be at least 1, got {dimension}")
    if not 0 < theta < dimension:
        raise DomainError(f"theta must lie in (0, {dimension}), got {theta}")
    return (dimension - theta) / dimension
