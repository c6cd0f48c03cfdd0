"""Shared fixtures: expensive ground states are solved once per session."""

import numpy as np
import pytest

from nlslab import ModelParams, ThresholdSet, solve_shooting


@pytest.fixture(scope="session")
def params18():
    return ModelParams(1, 8.0, lam=1.0, omega=1.0)


@pytest.fixture(scope="session")
def gs18(params18):
    return solve_shooting(params18)


@pytest.fixture(scope="session")
def ts18(gs18):
    return ThresholdSet.from_ground_state(gs18)


@pytest.fixture(scope="session")
def gs12():
    # mass-subcritical, orbitally stable soliton (used for long-time runs)
    return solve_shooting(ModelParams(1, 2.0, lam=1.0, omega=1.0))


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20260823)
