import numpy as np
import pytest

from rieszvar import build_grid, sample_catalog


@pytest.fixture
def unit_grid():
    """[0, 1] with h = 1/256."""
    return build_grid(1, [0.0], 1 / 256, [257])


@pytest.fixture
def fine_unit_grid():
    """[0, 1] with h = 1/1024."""
    return build_grid(1, [0.0], 1 / 1024, [1025])


@pytest.fixture
def symmetric_grid():
    """[-1, 1] with h = 2/2047 (no node at the origin)."""
    return build_grid(1, [-1.0], 2 / 2047, [2048])


@pytest.fixture
def disk_grid():
    """2D grid on [-1, 1]^2 masked to the open unit disk."""
    return build_grid(
        2, [-1.0, -1.0], 0.1, [21, 21],
        lambda pts: np.linalg.norm(pts, axis=-1) < 1.0,
    )


def linear(grid, slope=1.0, intercept=0.0):
    return sample_catalog(grid, "linear", {"slope": slope, "intercept": intercept})


def const_weight(grid, value=1.0):
    return sample_catalog(grid, "constant", {"value": value})
