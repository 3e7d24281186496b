"""Tests for the circulant FFT oracle."""

import numpy as np
import pytest

from critspectra.constants import ISING_THETA, ISING_ZETA
from critspectra.errors import DomainError
from critspectra.models import CirculantSpec
from critspectra.services.fitting import default_window, fit_power_law
from critspectra.services.oracle import (
    circulant_eigenvalues,
    circulant_kernel,
    materialize_circulant,
    theoretical_zeta,
)
from critspectra.services.spectra import eigenvalues_symmetric


class TestKernel:
    def test_minimal_image_distance(self):
        spec = CirculantSpec(dimension=1, size=8, theta=1.0)
        kernel = circulant_kernel(spec)
        np.testing.assert_allclose(kernel, [1.0, 1.0, 1 / 2, 1 / 3, 1 / 4, 1 / 3, 1 / 2, 1.0])

    def test_two_dimensional_distance(self):
        spec = CirculantSpec(dimension=2, size=4, theta=2.0, zero_value=5.0)
        kernel = circulant_kernel(spec)
        assert kernel[0, 0] == 5.0
        assert kernel[1, 1] == pytest.approx(0.5)
        assert kernel[3, 2] == pytest.approx(1 / 5)

    def test_materialized_matrix_is_symmetric_circulant(self):
        dense = materialize_circulant(CirculantSpec(dimension=1, size=6, theta=0.5))
        np.testing.assert_array_equal(dense, dense.T)
        np.testing.assert_array_equal(dense[1], np.roll(dense[0], 1))


class TestCirculantEigenvalues:
    def test_delta_kernel(self):
        spec = CirculantSpec(dimension=2, size=8, theta=0.25, prefactor=0.0, zero_value=1.0)
        np.testing.assert_allclose(circulant_eigenvalues(spec).values, 1.0)

    @pytest.mark.parametrize(
        "spec",
        [
            CirculantSpec(dimension=1, size=64, theta=0.25),
            CirculantSpec(dimension=2, size=8, theta=0.25),
            CirculantSpec(dimension=2, size=6, theta=1.5, prefactor=2.0, zero_value=3.0),
        ],
    )
    def test_matches_dense_diagonalization(self, spec):
        fast = circulant_eigenvalues(spec).values
        dense = eigenvalues_symmetric(materialize_circulant(spec)).values
        np.testing.assert_allclose(fast, dense, atol=1e-8)

    def test_trace_and_largest_eigenvalue(self):
        spec = CirculantSpec(dimension=2, size=16, theta=0.25)
        spectrum = circulant_eigenvalues(spec)
        assert np.sum(spectrum.values) == pytest.approx(256 * spec.zero_value, rel=1e-10)
        assert spectrum.values[0] == pytest.approx(circulant_kernel(spec).sum(), rel=1e-12)
        assert len(spectrum) == spec.site_count

    def test_fitted_exponent_in_power_law_regime(self):
        spectrum = circulant_eigenvalues(CirculantSpec(dimension=2, size=64, theta=0.25))
        fit = fit_power_law(spectrum, default_window(len(spectrum)))
        assert (fit.n_min, fit.n_max) == (10, 102)
        assert fit.zeta == pytest.approx(0.875, abs=0.03)

    def test_one_dimensional_exponent_converges_with_size(self):
        errors = []
        for size in (1024, 65536):
            spectrum = circulant_eigenvalues(CirculantSpec(dimension=1, size=size, theta=0.25))
            fit = fit_power_law(spectrum, default_window(size))
            errors.append(abs(fit.zeta - 0.75))
        assert errors[1] < errors[0]
        assert errors[1] < 0.06


class TestTheoreticalZeta:
    @pytest.mark.parametrize(
        ("dimension", "theta", "expected"),
        [(1, 0.25, 0.75), (2, 0.25, 0.875), (2, 1.0, 0.5)],
    )
    def test_values(self, dimension, theta, expected):
        assert theoretical_zeta(dimension, theta) == pytest.approx(expected)

    @pytest.mark.parametrize(("dimension", "theta"), [(1, 0.0), (1, 1.0), (2, 2.5), (0, 0.5)])
    def test_domain(self, dimension, theta):
        with pytest.raises(DomainError):
            theoretical_zeta(dimension, theta)

    def test_ising_exponent(self):
        assert theoretical_zeta(2, ISING_THETA) == ISING_ZETA

    def test_circulant_validation(self):
        with pytest.raises(ValueError):
            CirculantSpec(dimension=3, size=8, theta=0.25)
