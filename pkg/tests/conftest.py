"""Shared fixtures: every randomized probe draws from one documented seed."""

import numpy as np
import pytest

from qcmd import RunConfig, initial_state

SEED = 20260810


@pytest.fixture
def rng():
    return np.random.default_rng(SEED)


@pytest.fixture(scope="session")
def paper_config():
    """The reference setup: h = 0.04 Gaussian packet at -1 with phase 50."""
    return RunConfig()


@pytest.fixture(scope="session")
def paper_state(paper_config):
    return initial_state(paper_config)


def random_normalized_wavefunction(grid, h, rng):
    from qcmd import WaveFunction, normalize
    vals = rng.normal(size=grid.n_points) + 1j * rng.normal(size=grid.n_points)
    return normalize(WaveFunction(grid, vals, h))
