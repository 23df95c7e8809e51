import numpy as np
import pytest

from warpdepth.curves import Curve, Grid, WarpingCurve
from warpdepth.simulation import exp_growth_inverse_values


@pytest.fixture
def grid():
    return Grid.uniform(0.0, 1.0, 100)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def exp_warp(grid, w):
    """Forward warp of the exponential family on the given grid."""
    return WarpingCurve(grid, exp_growth_inverse_values(grid.t, w))


def smooth_curve(grid, rng, terms=4):
    """Random smooth curve: a low-order trigonometric polynomial."""
    t = grid.t
    y = rng.normal(0.0, 1.0) * np.ones_like(t)
    for k in range(1, terms + 1):
        y = y + rng.normal(0.0, 1.0 / k) * np.sin(np.pi * k * t)
        y = y + rng.normal(0.0, 1.0 / k) * np.cos(np.pi * k * t)
    return Curve(grid, y)
