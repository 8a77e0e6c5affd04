"""Shared fixtures for the test suite.

Grids are session scoped because LineCalculus instances precompute image
kernels; reusing them keeps the suite fast.
"""

import numpy as np
import pytest

from bolab.lineops import LineCalculus
from bolab.spectral_core import Field, Grid


@pytest.fixture(scope="session")
def grid_small():
    return Grid(1024, 64.0)


@pytest.fixture(scope="session")
def grid_medium():
    return Grid(4096, 128.0)


@pytest.fixture(scope="session")
def calculus_medium(grid_medium):
    return LineCalculus(grid_medium)


@pytest.fixture(scope="session")
def gaussian_medium(grid_medium):
    return Field.from_function(grid_medium, lambda x: np.exp(-x ** 2))


@pytest.fixture(scope="session")
def dipole_medium(grid_medium):
    return Field.from_function(grid_medium,
                               lambda x: x * np.exp(-x ** 2))


@pytest.fixture()
def rng():
    return np.random.default_rng(7)
