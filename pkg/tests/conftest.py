# tests/conftest.py - Shared fixtures

import pytest

from models.covering import CoveringParams
from models.grid import GridSpec
from models.space import MixedExponents, SpaceParams
from analyzers.fourier_analyzer import FourierAnalyzer
from analyzers.modulation_analyzer import cached_bapu
from tests.generators import gaussian


@pytest.fixture(scope='session')
def grid_1d():
    return GridSpec.default(1)


@pytest.fixture(scope='session')
def grid_2d():
    return GridSpec.default(2)


@pytest.fixture(scope='session')
def small_grid_2d():
    return GridSpec(2, 8.0, 32)


@pytest.fixture
def gaussian_1d(grid_1d):
    return FourierAnalyzer.sample_function(grid_1d, gaussian())


@pytest.fixture
def gaussian_2d(grid_2d):
    return FourierAnalyzer.sample_function(grid_2d, gaussian())


@pytest.fixture
def space_1d():
    return SpaceParams(0.5, 1.0, MixedExponents((2.0,)), 2.0)


@pytest.fixture(scope='session')
def bapu_1d(grid_1d):
    return cached_bapu(CoveringParams(0.5), grid_1d)
