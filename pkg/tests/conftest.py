import numpy as np
import pytest

from relayfield import Region, SystemParams


@pytest.fixture
def params():
    """The desk configuration used throughout the suite."""
    return SystemParams(snr_budget=100.0, path_loss=2.0, threshold=1.0,
                        subcarriers=4, r_sd=5.0)


@pytest.fixture
def disc():
    return Region.disc(5.0)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
