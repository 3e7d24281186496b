"""Tests for power-law fits, the size study and emerging-spectrum runs."""

import logging
import math
import pickle

import numpy as np
import pytest

from critspectra.config import settings
from critspectra.errors import CapacityError, DomainError, FitError, PipelineError
from critspectra.models import EmergingScanConfig, SimConfig, StudyConfig
from critspectra.services.correlation import build_correlation, standardize, truncate_series
from critspectra.services.fitting import (
    default_window,
    exponent_vs_size,
    fit_pipeline_run,
    fit_power_law,
    study_seeds,
)
from critspectra.services.pipeline import emerging_from_matrix, emerging_from_series, emerging_scan
from critspectra.services.spectra import Spectrum, zipf_series


def _power_law(count, zeta, prefactor=1.0):
    ranks = np.arange(1, count + 1, dtype=np.float64)
    return Spectrum.from_values(prefactor * ranks**-zeta)


class TestFitPowerLaw:
    def test_exact_power_law(self):
        fit = fit_power_law(_power_law(200, 0.875), (1, 100))
        assert fit.zeta == pytest.approx(0.875, abs=1e-12)
        assert fit.rmse < 1e-12
        assert fit.point_count == 100
        assert fit.window == (1, 100)

    def test_prefactor(self):
        fit = fit_power_law(_power_law(50, 0.5, prefactor=3.0), (1, 50))
        assert fit.log_prefactor == pytest.approx(math.log(3.0), abs=1e-12)

    def test_scale_invariance(self):
        base = fit_power_law(_power_law(100, 0.7), (5, 60))
        scaled = fit_power_law(_power_law(100, 0.7, prefactor=4.0), (5, 60))
        assert scaled.zeta == pytest.approx(base.zeta, abs=1e-12)
        assert scaled.log_prefactor - base.log_prefactor == pytest.approx(math.log(4.0))

    def test_input_forms_agree(self):
        spectrum = _power_law(30, 0.6)
        from_spectrum = fit_power_law(spectrum, (1, 20))
        from_zipf = fit_power_law(zipf_series(spectrum), (1, 20))
        from_pairs = fit_power_law(zipf_series(spectrum).pairs(), (1, 20))
        assert from_zipf.zeta == from_spectrum.zeta
        assert from_pairs.zeta == pytest.approx(from_spectrum.zeta, abs=1e-12)

    def test_sparse_ranks(self):
        ranks = np.arange(1, 101, 2)
        pairs = [(int(n), float(n) ** -0.875) for n in ranks]
        assert fit_power_law(pairs, (1, 100)).zeta == pytest.approx(0.875, abs=1e-12)

    def test_window_clipped_to_series(self):
        fit = fit_power_law(_power_law(30, 0.5), (1, 1000))
        assert fit.n_max == 30
        assert fit.point_count == 30

    def test_non_positive_values_excluded(self, caplog):
        values = np.arange(1, 11, dtype=np.float64) ** -0.5
        values[-2:] = [0.0, -0.1]
        with caplog.at_level(logging.WARNING):
            fit = fit_power_law(zipf_series(Spectrum.from_values(values)), (1, 10))
        assert fit.point_count == 8
        assert fit.excluded_count == 2
        assert "Excluded non-positive" in caplog.text

    def test_too_few_points(self):
        with pytest.raises(FitError):
            fit_power_law(_power_law(10, 0.5), (1, 4))

    @pytest.mark.parametrize("window", [(0, 10), (10, 5)])
    def test_invalid_window(self, window):
        with pytest.raises(DomainError):
            fit_power_law(_power_law(20, 0.5), window)


class TestDefaultWindow:
    @pytest.mark.parametrize(
        ("count", "expected"),
        [
            (1024, (3, 26)),
            (36864, (92, 922)),
            (576, (2, 14)),
            (256, (2, 6)),
            (64, (2, 6)),
            (4, (2, 4)),
            (1, (1, 1)),
        ],
    )
    def test_windows(self, count, expected):
        assert default_window(count) == expected

    @pytest.mark.parametrize("count", [16, 100, 256, 599, 800, 5000])
    def test_leading_mode_stays_out(self, count):
        n_min, n_max = default_window(count)
        assert n_min >= 2
        assert n_max - n_min + 1 >= 5
        assert n_max <= count


class TestPipelineRun:
    @pytest.fixture
    def config(self):
        return SimConfig(lattice_size=8, beta2j="critical", seed=3, equilibration_steps=100, tau=64)

    def test_runs_end_to_end(self, config):
        run = fit_pipeline_run(config, window=(1, 10))
        assert run.lattice_size == 8
        assert run.seed == 3
        assert len(run.spectrum) == 64
        assert run.fit.point_count == 10

    def test_deterministic(self, config):
        first = fit_pipeline_run(config, window=(1, 10))
        second = fit_pipeline_run(config, window=(1, 10))
        assert first.fit.zeta == second.fit.zeta

    def test_subsampled_run(self, config):
        run = fit_pipeline_run(config, window=(1, 8), subsample_fraction=0.5)
        assert len(run.spectrum) == 32

    def test_failure_carries_size_and_seed(self, config, monkeypatch):
        monkeypatch.setattr(settings, "max_series_bytes", 100)
        with pytest.raises(PipelineError) as excinfo:
            fit_pipeline_run(config, window=(1, 10))
        error = excinfo.value
        assert (error.lattice_size, error.seed) == (8, 3)
        assert isinstance(error.cause, CapacityError)
        assert error.exit_code == 3

    def test_pipeline_error_survives_pickling(self):
        error = PipelineError(16, 4, FitError("only 2 usable points"))
        restored = pickle.loads(pickle.dumps(error))
        assert (restored.lattice_size, restored.seed) == (16, 4)
        assert restored.exit_code == error.exit_code
        assert restored.message == error.message


class TestExponentVsSize:
    @pytest.fixture
    def template(self):
        return SimConfig(lattice_size=4, beta2j="critical", seed=0, equilibration_steps=20, tau=40)

    def test_summaries_per_size(self, template):
        study = StudyConfig(sizes=[4, 6], runs_per_size=2, window_min=1, window_max=6)
        summaries, runs = exponent_vs_size(study, template, jobs=1)
        assert [summary.lattice_size for summary in summaries] == [4, 6]
        assert len(runs) == 4
        for summary in summaries:
            assert summary.seeds == study_seeds(0, 2)
            assert summary.stderr >= 0
            assert summary.zeta == pytest.approx(np.mean([fit.zeta for fit in summary.fits]))

    def test_reproducible(self, template):
        study = StudyConfig(sizes=[4, 6], runs_per_size=2, window_min=1, window_max=6)
        first, _ = exponent_vs_size(study, template, jobs=1)
        second, _ = exponent_vs_size(study, template, jobs=1)
        assert [s.zeta for s in first] == [s.zeta for s in second]

    def test_tau_multiple_scales_recording(self, template):
        study = StudyConfig(sizes=[4, 6], runs_per_size=1, tau_multiple=3, window_min=1, window_max=6)
        _, runs = exponent_vs_size(study, template, jobs=1)
        assert [run.spectrum.source_tau for run in runs] == [48, 108]

    def test_single_size_from_a_list(self, template):
        summaries, _ = exponent_vs_size([20], template.model_copy(update={"tau": 200}), jobs=1)
        assert len(summaries) == 1
        assert summaries[0].stderr == 0.0

    def test_needs_a_size(self, template):
        with pytest.raises(DomainError):
            exponent_vs_size([], template)


class TestEmergingRuns:
    def test_split_of_short_simulated_series(self, small_series):
        window = truncate_series(small_series, 16)
        _, degenerate = standardize(window)
        split, rank = emerging_from_series(window, 1.001)
        assert rank == 15 + int(degenerate.sum())
        assert len(split.bulk) == rank
        assert len(split.emerging) == 64 - rank

    def test_full_rank_matrix_rejected(self, small_series):
        with pytest.raises(DomainError, match="tau window"):
            emerging_from_matrix(build_correlation(small_series), 1.001)

    def test_scan_cells(self):
        template = SimConfig(lattice_size=6, beta2j=0.001, seed=2, equilibration_steps=10, tau=2)
        scan = EmergingScanConfig(beta2j="0.001, critical", tau_fractions="1/4, 1/2", replicas=2)
        entries = emerging_scan(template, scan, jobs=1)
        assert len(entries) == 4
        assert [entry.tau for entry in entries] == [9, 18, 9, 18]
        assert entries[0].baseline is entries[2].baseline
        for entry in entries:
            assert len(entry.splits) == 2
            assert entry.density.integral() == pytest.approx(1.0)
            assert entry.density.sample_count == sum(len(split.emerging) for split in entry.splits)
            assert 0 <= entry.replicas_with_negatives <= 2
            assert entry.negative_count >= entry.replicas_with_negatives

    def test_scan_replicas_are_independent_runs(self):
        template = SimConfig(lattice_size=6, beta2j="critical", seed=5, equilibration_steps=10, tau=2)
        scan = EmergingScanConfig(beta2j="critical", tau_fractions="1/4", replicas=3)
        [entry] = emerging_scan(template, scan, jobs=1)
        first, second, third = (split.emerging.values for split in entry.splits)
        assert not np.array_equal(first, second)
        assert not np.array_equal(second, third)
        again = emerging_scan(template, scan, jobs=1)[0]
        np.testing.assert_array_equal(again.density.densities, entry.density.densities)
