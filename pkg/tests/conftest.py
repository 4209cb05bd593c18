import numpy as np
import pytest

from allencahn import Grid1D, cubic, solve_standing_wave


@pytest.fixture(scope="session")
def cubic_reaction():
    return cubic()


@pytest.fixture(scope="session")
def fine_profile(cubic_reaction):
    """Production standing-wave table: L = 12, dx = 1e-3."""
    return solve_standing_wave(cubic_reaction, Grid1D(12.0, 24000))


@pytest.fixture(scope="session")
def coeff_profile(cubic_reaction):
    """Coefficient-grade table: L = 12, dx = 5e-3 (matches the operator grid)."""
    return solve_standing_wave(cubic_reaction, Grid1D(12.0, 4800))
