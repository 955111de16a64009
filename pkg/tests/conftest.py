import numpy as np
import pytest

from app.config import SearchSettings


@pytest.fixture
def rng():
    """Seeded generator so random draws are identical run to run."""
    return np.random.default_rng(1234)


@pytest.fixture(scope="session")
def fast_search():
    """Coarse search for depolarising sweeps, whose entropy landscape is flat."""
    return SearchSettings(theta_points=4, phi_points=8, min_step=1e-6)
