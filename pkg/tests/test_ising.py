"""Tests for the Metropolis simulator."""

import math

import numpy as np
import pytest

from critspectra.config import settings
from critspectra.errors import CapacityError, DomainError
from critspectra.models import SimConfig
from critspectra.services import seeding
from critspectra.services.ising import (
    SpinLattice,
    TimeSeriesMatrix,
    acceptance_table,
    advance,
    check_capacity,
    critical_temperature,
    magnetization,
    mean_bond_product,
    metropolis_flip,
    simulate,
    total_energy,
)


def _lattice(spins, seed=0):
    spins = np.asarray(spins, dtype=np.int8)
    return SpinLattice(size=spins.shape[0], spins=spins, rng=np.random.default_rng(seed))


class TestCriticalTemperature:
    def test_unit_coupling(self):
        assert critical_temperature(1.0) == pytest.approx(2.269185314213022, abs=1e-12)

    def test_scales_linearly_with_coupling(self):
        assert critical_temperature(2.5) == pytest.approx(2.5 * critical_temperature(1.0))

    @pytest.mark.parametrize("coupling", [0.0, -1.0])
    def test_non_positive_coupling_rejected(self, coupling):
        with pytest.raises(DomainError):
            critical_temperature(coupling)


class TestTotalEnergy:
    def test_aligned_lattice(self):
        lattice = SpinLattice.uniform(4, np.random.default_rng(0))
        assert total_energy(lattice, 1.0) == -32.0

    def test_checkerboard(self):
        rows, cols = np.indices((4, 4))
        lattice = _lattice(np.where((rows + cols) % 2 == 0, 1, -1))
        assert total_energy(lattice, 1.0) == 32.0

    def test_single_flipped_spin(self):
        lattice = SpinLattice.uniform(4, np.random.default_rng(0))
        lattice.spins[2, 1] = -1
        assert total_energy(lattice, 1.0) == -24.0

    def test_scales_with_coupling(self):
        lattice = SpinLattice.random(6, np.random.default_rng(3))
        assert total_energy(lattice, 0.5) == pytest.approx(0.5 * total_energy(lattice, 1.0))


class TestSpinLattice:
    def test_rejects_non_unit_spins(self):
        with pytest.raises(DomainError):
            _lattice([[1, 0], [1, 1]])

    def test_rejects_tiny_lattice(self):
        with pytest.raises(DomainError):
            SpinLattice(size=1, spins=np.ones((1, 1)), rng=np.random.default_rng(0))

    def test_random_lattice_has_unit_spins(self):
        lattice = SpinLattice.random(10, np.random.default_rng(1))
        assert set(np.unique(lattice.spins)) <= {-1, 1}
        assert lattice.spins.dtype == np.int8

    def test_neighbour_sum_wraps(self):
        spins = np.ones((3, 3), dtype=np.int8)
        spins[2, 0] = -1
        lattice = _lattice(spins)
        assert lattice.neighbour_sum(0) == 2


class TestMetropolisFlip:
    def test_downhill_flip_always_accepted(self):
        spins = np.ones((4, 4), dtype=np.int8)
        spins[1, 1] = -1
        lattice = _lattice(spins)
        assert metropolis_flip(lattice, 5, temperature=0.1) is True
        assert np.all(lattice.spins == 1)

    def test_zero_temperature_rejects_uphill(self):
        lattice = SpinLattice.uniform(4, np.random.default_rng(0))
        assert metropolis_flip(lattice, 0, temperature=0.0) is False
        assert lattice.spins[0, 0] == 1

    def test_infinite_temperature_accepts_uphill(self):
        lattice = SpinLattice.uniform(4, np.random.default_rng(0))
        assert metropolis_flip(lattice, 0, temperature=math.inf) is True
        assert lattice.spins[0, 0] == -1

    def test_consumes_one_uniform_per_proposal(self):
        lattice = SpinLattice.uniform(4, np.random.default_rng(11))
        reference = np.random.default_rng(11)
        metropolis_flip(lattice, 3, temperature=0.0)
        reference.random()
        assert lattice.rng.random() == reference.random()

    def test_uphill_acceptance_rate(self):
        # dU = 8J at T = 4J: acceptance exp(-2)
        lattice = SpinLattice.uniform(4, np.random.default_rng(5))
        trials = 20_000
        accepted = 0
        for _ in range(trials):
            if metropolis_flip(lattice, 0, temperature=4.0):
                accepted += 1
                lattice.spins[0, 0] = 1
        assert accepted / trials == pytest.approx(math.exp(-2.0), abs=0.012)

    def test_rejects_out_of_range_site(self):
        lattice = SpinLattice.uniform(4, np.random.default_rng(0))
        with pytest.raises(DomainError):
            metropolis_flip(lattice, 16, temperature=1.0)


class TestAdvance:
    def test_acceptance_table_levels(self):
        table = acceptance_table(0.5)
        assert table[:3].tolist() == [1.0, 1.0, 1.0]
        assert table[3] == pytest.approx(math.exp(-1.0))
        assert table[4] == pytest.approx(math.exp(-2.0))

    def test_infinite_temperature_accepts_everything(self):
        assert np.all(acceptance_table(0.0) == 1.0)

    def test_energy_change_matches_total_energy(self):
        lattice = SpinLattice.random(8, np.random.default_rng(2))
        before = total_energy(lattice, 1.0)
        delta = advance(lattice, 0.7, 2_000)
        assert total_energy(lattice, 1.0) - before == delta

    def test_sign_flipped_start_gives_flipped_trajectory(self):
        start = SpinLattice.random(8, np.random.default_rng(6)).spins
        up = _lattice(start, seed=21)
        down = _lattice(-start, seed=21)
        for _ in range(20):
            advance(up, 0.3, 640)
            advance(down, 0.3, 640)
            np.testing.assert_array_equal(down.spins, -up.spins)

    def test_low_temperature_keeps_order(self):
        lattice = SpinLattice.uniform(8, np.random.default_rng(4))
        for _ in range(100):
            advance(lattice, 4.0, 640)
        assert abs(magnetization(lattice)) > 0.9


class TestSimulate:
    def test_shape_and_values(self, small_config, small_series):
        assert small_series.data.shape == (64, small_config.tau)
        assert small_series.data.dtype == np.int8
        assert set(np.unique(small_series.data)) <= {-1, 1}
        assert small_series.is_full_lattice

    def test_deterministic_given_seed(self, small_config):
        first = simulate(small_config)
        second = simulate(small_config)
        assert np.array_equal(first.data, second.data)

    def test_seed_changes_the_run(self, small_config):
        other = small_config.model_copy(update={"seed": 2})
        assert not np.array_equal(simulate(small_config).data, simulate(other).data)

    def test_default_time_step_is_ten_sweeps(self, small_config):
        assert small_config.flips == 10 * 64

    @pytest.mark.parametrize("steps", [100_000, pytest.param(1_000_000, marks=pytest.mark.slow)])
    def test_detailed_balance_on_two_by_two_lattice(self, steps):
        # Energy levels -8, 0, 8 with degeneracies 2, 12, 2
        beta2j = 0.25
        config = SimConfig(
            lattice_size=2,
            beta2j=beta2j,
            seed=7,
            equilibration_steps=100,
            tau=steps,
            flips_per_step=40,
        )
        frames = simulate(config).data.astype(np.int64).reshape(2, 2, -1)
        bonds = frames * np.roll(frames, -1, axis=0) + frames * np.roll(frames, -1, axis=1)
        energies = -bonds.sum(axis=(0, 1))

        weights = {
            -8: 2 * math.exp(8 * beta2j / 2),
            0: 12.0,
            8: 2 * math.exp(-8 * beta2j / 2),
        }
        total = sum(weights.values())
        for level, weight in weights.items():
            expected = weight / total
            sigma = math.sqrt(expected * (1 - expected) / steps)
            assert abs(np.mean(energies == level) - expected) < 3 * sigma

    def test_columns_replay_from_public_operations(self):
        config = SimConfig(lattice_size=5, beta2j=0.4, seed=11, equilibration_steps=7, tau=12)
        series = simulate(config)

        lattice = SpinLattice.random(5, seeding.generator(config.seed, "ising"))
        for _ in range(config.equilibration_steps):
            advance(lattice, config.beta2j, config.flips)
        previous = total_energy(lattice, 1.0)
        for step in range(config.tau):
            change = advance(lattice, config.beta2j, config.flips)
            np.testing.assert_array_equal(series.data[:, step], lattice.spins.reshape(-1))
            current = total_energy(lattice, 1.0)
            assert current - previous == change
            previous = current

    def test_mean_bond_product_high_temperature_near_zero(self):
        config = SimConfig(lattice_size=8, beta2j=0.001, seed=3, equilibration_steps=10, tau=200)
        assert abs(mean_bond_product(simulate(config))) < 0.05


class TestTimeSeriesMatrix:
    def test_rejects_duplicate_sites(self):
        with pytest.raises(DomainError):
            TimeSeriesMatrix(data=np.ones((2, 3)), site_indices=np.array([1, 1]))

    def test_rejects_sites_outside_lattice(self):
        with pytest.raises(DomainError):
            TimeSeriesMatrix(data=np.ones((2, 3)), site_indices=np.array([0, 4]), lattice_size=2)

    def test_from_array_numbers_rows(self):
        series = TimeSeriesMatrix.from_array(np.zeros((3, 5)))
        assert series.site_indices.tolist() == [0, 1, 2]
        assert (series.n_series, series.tau) == (3, 5)


class TestCapacity:
    def test_oversize_recording_rejected(self):
        config = SimConfig(lattice_size=64, beta2j=0.4, seed=0, tau=1000)
        with pytest.raises(CapacityError) as excinfo:
            check_capacity(config, limit_bytes=1024)
        assert excinfo.value.limit_bytes == 1024
        assert excinfo.value.exit_code == 3

    def test_uses_settings_ceiling(self, monkeypatch):
        monkeypatch.setattr(settings, "max_series_bytes", 100)
        config = SimConfig(lattice_size=8, beta2j=0.4, seed=0, tau=10)
        with pytest.raises(CapacityError):
            simulate(config)
