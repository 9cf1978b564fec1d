import pytest

from bopshox.params import SystemParams


@pytest.fixture
def p06():
    """Reference point used throughout: delta = 0.6, Omega_bar = 0.2, unit m, M, omega."""
    return SystemParams.from_reduced(0.6, 0.2)
