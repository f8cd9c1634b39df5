import os
import sys

import numpy as np
import pytest

sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from utils.data_models import Field, GridSpec  # noqa: E402


def smooth_profile(x, length, rng, modes=4):
    """Random trigonometric polynomial in x of period length, rescaled onto [0, 1]."""
    profile = np.zeros_like(x)
    for k in range(1, modes + 1):
        profile += rng.normal() / k * np.cos(2 * np.pi * k * x / length + rng.uniform(0, 2 * np.pi))
    return (profile - profile.min()) / (profile.max() - profile.min())


@pytest.fixture
def rng():
    return np.random.default_rng(20240607)


@pytest.fixture
def unit_grid():
    """Resolved 1-D grid: L = 2π, N = 256."""
    return GridSpec.uniform(2 * np.pi, 256)


@pytest.fixture
def wide_grid():
    return GridSpec.uniform(40.0, 256)


@pytest.fixture
def smooth_field(wide_grid, rng):
    """Band-limited real field with range exactly [0.2, 0.9]."""
    x = wide_grid.axis(0)
    return Field(grid=wide_grid, values=0.2 + 0.7 * smooth_profile(x, 40.0, rng))
