import numpy as np
import pytest

from cbftorus.grid import TorusGrid
from cbftorus.families import random_band_limited
from cbftorus.verification import FieldSampler


@pytest.fixture(scope="session")
def grid32():
    return TorusGrid(dim=2, n_points=32)


@pytest.fixture(scope="session")
def grid64():
    return TorusGrid(dim=2, n_points=64)


@pytest.fixture(scope="session")
def grid3d():
    return TorusGrid(dim=3, n_points=16)


@pytest.fixture(scope="session")
def sampler32(grid32):
    return FieldSampler(grid=grid32, seed=42, band_limit=8)


@pytest.fixture
def random_field(grid32):
    return random_band_limited(grid32, seed=1, band_limit=8)


@pytest.fixture
def random_field_b(grid32):
    return random_band_limited(grid32, seed=2, band_limit=8)


def rel_diff(a, b):
    a, b = np.asarray(a), np.asarray(b)
    scale = max(np.max(np.abs(a)), np.max(np.abs(b)), 1e-300)
    return np.max(np.abs(a - b)) / scale
