import numpy as np
import pytest

from splashwave.curve import InterfaceCurve
from splashwave.spectral import Grid


@pytest.fixture
def grid64():
    return Grid(64)


@pytest.fixture
def grid128():
    return Grid(128)


@pytest.fixture
def flat_curve(grid128):
    return InterfaceCurve(grid128, grid128.alpha.copy(), np.zeros(128))


@pytest.fixture
def circle_ccw(grid128):
    """Counterclockwise unit-style circle (quadrature fixture; the water
    side is the exterior for this orientation)."""
    return InterfaceCurve(grid128, 1.5 * np.cos(grid128.alpha),
                          1.5 * np.sin(grid128.alpha), "tilde")


@pytest.fixture
def circle_cw(grid128):
    """Clockwise circle: water inside, the valid orientation for mapped
    interfaces."""
    return InterfaceCurve(grid128, 1.5 * np.cos(-grid128.alpha),
                          1.5 * np.sin(-grid128.alpha), "tilde")


def perturbed_sheet(n=256):
    grid = Grid(n)
    z1 = grid.alpha + 0.1 * np.sin(grid.alpha)
    z2 = 0.1 * np.cos(grid.alpha)
    return InterfaceCurve(grid, z1, z2)


@pytest.fixture
def perturbed_sheet_256():
    return perturbed_sheet(256)


def poisson_strength(grid, q=0.6):
    """Sheet strength with exactly geometric coefficient decay q^|m|,
    handy for measuring spectral convergence before the roundoff floor."""
    return (1 - q ** 2) / (1 - 2 * q * np.cos(grid.alpha) + q ** 2)
