import numpy as np
import pytest

from viscowave.model import canonical_params
from viscowave.spectrum import control_time_threshold, root_table, spectral_limits


@pytest.fixture(scope="session")
def params():
    return canonical_params()


@pytest.fixture(scope="session")
def roots50(params):
    return root_table(params, 50)


@pytest.fixture(scope="session")
def limits50(params, roots50):
    return spectral_limits(params, 50, (0.01,), roots=roots50)


@pytest.fixture(scope="session")
def t0(params, limits50):
    return control_time_threshold(params, limits50)


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
