import numpy as np
import pytest

from divkit import DiscreteDensity, GaussianDensity


@pytest.fixture
def discrete_pair():
    """The worked two-point example: q = (0.5, 0.5) against p = (0.8, 0.2)."""
    return DiscreteDensity([0.5, 0.5]), DiscreteDensity([0.8, 0.2])


@pytest.fixture
def gaussian_pair():
    return GaussianDensity(0.0, 1.0), GaussianDensity(1.0, 1.0)


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
