import numpy as np
import pytest
from harmonic_bimodules.models.subspace import Numerics


def pytest_addoption(parser):
    parser.addoption(
        "--backend",
        action="store",
        default="svd",
        choices=["svd", "gram-schmidt"],
        help="Choose orthonormalization backend for tests",
    )


@pytest.fixture(scope="session")
def backend(pytestconfig):
    return pytestconfig.getoption("backend")


@pytest.fixture(scope="session")
def numerics(backend):
    return Numerics(orthonormalizer=backend)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
