"""Desk-scale reproduction checks; run with --runslow (minutes each)."""

import numpy as np
import pytest
from scipy import stats

from critspectra.constants import ISING_THETA
from critspectra.models import CirculantSpec, MPParams, SimConfig, StudyConfig
from critspectra.services.correlation import build_correlation, truncate_series
from critspectra.services.fitting import (
    default_window,
    exponent_vs_size,
    fit_pipeline_run,
    fit_power_law,
)
from critspectra.services.ising import mean_bond_product, simulate
from critspectra.services.oracle import circulant_eigenvalues, theoretical_zeta
from critspectra.services.pipeline import emerging_from_series
from critspectra.services.rmt import (
    mp_cdf,
    number_variance_baseline,
    sample_emerging_spectra,
    wigner_surmise,
)
from critspectra.services.spectra import (
    density_histogram,
    eigenvalues_symmetric,
    nearest_spacings,
    number_variance,
    unfold,
)

pytestmark = pytest.mark.slow

HOT = 0.001


def _config(size, beta2j, seed, tau_multiple=5, equilibration_steps=2_000):
    return SimConfig(
        lattice_size=size,
        beta2j=beta2j,
        seed=seed,
        equilibration_steps=equilibration_steps,
        tau=tau_multiple * size * size,
    )


class TestHighTemperature:
    def test_spectrum_follows_marchenko_pastur(self):
        series = simulate(_config(32, HOT, seed=0, equilibration_steps=100))
        assert abs(series.data.mean()) < 0.02
        spectrum = eigenvalues_symmetric(build_correlation(series))
        result = stats.kstest(spectrum.values, lambda x: mp_cdf(x, MPParams(kappa=0.2)))
        assert result.statistic < 0.05

    def test_fluctuations_match_random_matrices(self):
        unfolded = []
        for seed in range(10):
            series = simulate(_config(32, HOT, seed=seed, equilibration_steps=100))
            unfolded.append(unfold(eigenvalues_symmetric(build_correlation(series)), "mp"))

        spacings = np.concatenate([nearest_spacings(u) for u in unfolded])
        density = density_histogram(spacings, np.linspace(0, 3, 21))
        assert np.max(np.abs(density.densities - wigner_surmise(density.bin_centers))) < 0.05

        [(_, sigma2)] = number_variance(unfolded, [5.0])
        [(_, baseline)] = number_variance_baseline(1024, 5120, [5.0], replicas=10, seed=0)
        assert sigma2 == pytest.approx(baseline, abs=0.15)


class TestOracle:
    def test_two_dimensional_exponent(self):
        spectrum = circulant_eigenvalues(CirculantSpec(dimension=2, size=64, theta=ISING_THETA))
        fit = fit_power_law(spectrum, default_window(len(spectrum)))
        assert fit.zeta == pytest.approx(theoretical_zeta(2, ISING_THETA), abs=0.03)

    def test_one_dimensional_exponent_approaches_theory(self):
        # A unit self-coupling adds a finite-size offset that steepens the slope at L=1024
        expected = theoretical_zeta(1, 0.25)
        errors = []
        for size in (1024, 65536):
            spectrum = circulant_eigenvalues(CirculantSpec(dimension=1, size=size, theta=0.25))
            errors.append(abs(fit_power_law(spectrum, default_window(size)).zeta - expected))
        assert errors[1] < errors[0]
        assert errors[1] < 0.05


class TestCriticalPowerLaw:
    def test_bond_product_at_critical_temperature(self):
        series = simulate(_config(32, "critical", seed=0, tau_multiple=1))
        assert 0.6 <= mean_bond_product(series) <= 0.8

    def test_exponent_and_size_trend(self):
        template = _config(16, "critical", seed=0, equilibration_steps=10_000)
        study = StudyConfig(sizes=[16, 32, 48], runs_per_size=5, tau_multiple=5)
        summaries, _ = exponent_vs_size(study, template)
        by_size = {summary.lattice_size: summary for summary in summaries}
        assert 0.70 <= by_size[32].zeta <= 0.88
        assert by_size[48].zeta > by_size[16].zeta

    def test_subsampling_keeps_the_exponent(self):
        config = _config(48, "critical", seed=1, equilibration_steps=10_000)
        window = default_window(config.site_count)
        full = fit_pipeline_run(config, window)
        sub = fit_pipeline_run(config, window, subsample_fraction=0.25)
        assert sub.fit.rmse < 2 * full.fit.rmse
        assert sub.fit.zeta == pytest.approx(full.fit.zeta, abs=0.05)

    def test_critical_fit_separates_from_hot_fit(self):
        window = default_window(1024)
        critical = [
            fit_pipeline_run(_config(32, "critical", seed, equilibration_steps=10_000), window).fit
            for seed in range(5)
        ]
        hot = [
            fit_pipeline_run(_config(32, HOT, seed, equilibration_steps=100), window).fit
            for seed in range(5)
        ]
        # The hot Zipf curve hugs the upper Marchenko-Pastur edge: nearly flat, not a power law
        assert np.mean([fit.zeta for fit in critical]) >= 0.70
        assert np.mean([fit.zeta for fit in hot]) <= 0.25


class TestEmergingSpectrum:
    def test_wishart_emerging_spectrum_is_positive_at_large_dimension(self):
        spectra = sample_emerging_spectra(4096, 512, 1.001, replicas=20, seed=0)
        assert sum(int(np.count_nonzero(values < 0)) for values in spectra) == 0

    def test_wishart_negatives_thin_out_with_dimension(self):
        shares = []
        for dim in (256, 1024, 4096):
            spectra = sample_emerging_spectra(dim, dim // 8, 1.001, replicas=3, seed=1)
            negatives = sum(int(np.count_nonzero(values < 0)) for values in spectra)
            shares.append(negatives / sum(values.size for values in spectra))
        assert shares[0] > shares[1] >= shares[2]

    def test_critical_emerging_spectrum_has_negative_eigenvalues(self):
        with_negatives = 0
        for seed in range(10):
            series = simulate(_config(32, "critical", seed, tau_multiple=1, equilibration_steps=10_000))
            split, _ = emerging_from_series(truncate_series(series, 256), 1.001)
            with_negatives += bool(np.any(split.emerging.values < 0))
        assert with_negatives >= 8

