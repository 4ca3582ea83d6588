import numpy as np
import pytest
from hypothesis import HealthCheck, settings

import cgolab as cg

settings.register_profile(
    "ci",
    deadline=None,
    max_examples=25,
    derandomize=True,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("ci")

TWO_PI = 2.0 * np.pi


@pytest.fixture(scope="session")
def grid16():
    return cg.FrequencyGrid(3, 16, TWO_PI)


@pytest.fixture(scope="session")
def grid32():
    return cg.FrequencyGrid(3, 32, TWO_PI)


@pytest.fixture(scope="session")
def bump32(grid32):
    return cg.make_conductivity(grid32, {"kind": "gaussian", "amplitude": 0.05, "width": 0.3})


@pytest.fixture(scope="session")
def bump64():
    grid = cg.FrequencyGrid(3, 64, TWO_PI)
    return cg.make_conductivity(grid, {"kind": "gaussian", "amplitude": 0.05, "width": 0.3})


@pytest.fixture(scope="session")
def uniform32(grid32):
    return cg.make_conductivity(grid32, {"kind": "uniform"})


def random_field(grid, seed, representation="physical"):
    rng = np.random.default_rng(seed)
    vals = rng.standard_normal(grid.shape) + 1j * rng.standard_normal(grid.shape)
    return cg.Field(grid, representation, vals)
