import numpy as np
import pytest

from torwave import build_basis


@pytest.fixture(scope="session")
def haar():
    return build_basis("haar", 1)


@pytest.fixture(scope="session")
def db2():
    return build_basis("daubechies", 2)


@pytest.fixture(scope="session")
def db4():
    return build_basis("daubechies", 4)


@pytest.fixture
def rng():
    return np.random.default_rng(20240801)
