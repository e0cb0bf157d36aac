import numpy as np
import pytest

from akgeo import constructions as C
from akgeo.domains import sample_domain


@pytest.fixture(scope="session")
def example_metric():
    return C.example_metric()


@pytest.fixture(scope="session")
def example_coframe():
    return C.example_coframe()


@pytest.fixture(scope="session")
def uprime_points():
    return sample_domain(C.UPRIME, 20, 42)


@pytest.fixture
def rng():
    return np.random.default_rng(0)
