import numpy as np
import pytest

from ginv.linalg import DEFAULT_TOL


@pytest.fixture
def tol():
    return DEFAULT_TOL


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def make_rng(seed: int) -> np.random.Generator:
    return np.random.default_rng(seed)
