import numpy as np
import pytest

from neelwall.profiles import FieldParam, Grid, Offset, WindingNumber
from neelwall.solver import MinimizeConfig, minimize


@pytest.fixture(scope="session")
def single_wall_09():
    """Converged d = alpha/pi minimiser at h = 0.9 (compact single wall)."""
    return minimize(
        WindingNumber(0, Offset.PLUS),
        FieldParam(0.9),
        Grid(100.0, 2049),
        MinimizeConfig(),
    )


@pytest.fixture(scope="session")
def ell2_099():
    """Converged d = 2 - alpha/pi minimiser at h = 0.99 (three walls)."""
    return minimize(
        WindingNumber(2, Offset.MINUS),
        FieldParam(0.99),
        Grid(100.0, 2049),
        MinimizeConfig(),
    )


@pytest.fixture()
def rng():
    return np.random.default_rng(20240817)


def make_bump(grid, center, width, height=1.0):
    """Smooth bump with exact compact support [center - width, center + width]."""
    t = (grid.nodes - center) / width
    out = np.zeros(grid.n)
    inside = np.abs(t) < 1.0
    out[inside] = height * np.exp(1.0 - 1.0 / (1.0 - t[inside] ** 2))
    return out
