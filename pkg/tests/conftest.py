"""Pytest fixtures for critspectra tests."""

import os
import textwrap
from pathlib import Path

import numpy as np
import pytest

# Keep settings independent of the developer's environment
os.environ.setdefault("CRITSPECTRA_JOBS", "1")
os.environ.setdefault("CRITSPECTRA_LOG_LEVEL", "INFO")

from critspectra.models import SimConfig  # noqa: E402
from critspectra.services.ising import TimeSeriesMatrix, simulate  # noqa: E402


def pytest_addoption(parser):
    parser.addoption(
        "--runslow",
        action="store_true",
        default=False,
        help="run desk-scale reproduction tests",
    )


def pytest_collection_modifyitems(config, items):
    if config.getoption("--runslow"):
        return
    skip_slow = pytest.mark.skip(reason="needs --runslow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)


@pytest.fixture
def small_config():
    """An 8 x 8 lattice at the critical temperature, short recording."""
    return SimConfig(lattice_size=8, beta2j="critical", seed=1, equilibration_steps=50, tau=96)


@pytest.fixture
def small_series(small_config) -> TimeSeriesMatrix:
    return simulate(small_config)


@pytest.fixture
def gaussian_series():
    """Factory for independent standard-normal series of shape (dim, tau)."""

    def make(dim: int, tau: int, seed: int = 0) -> TimeSeriesMatrix:
        rng = np.random.default_rng(seed)
        return TimeSeriesMatrix.from_array(rng.standard_normal((dim, tau)), seed=seed)

    return make


@pytest.fixture
def write_config(tmp_path):
    """Write a run-config file from a dedented string and return its path."""

    def write(text: str, name: str = "run.cfg") -> Path:
        path = tmp_path / name
        path.write_text(textwrap.dedent(text).lstrip(), encoding="utf-8")
        return path

    return write
