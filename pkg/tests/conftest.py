import numpy as np
import pytest

from bellcert.pauli import code_preset


@pytest.fixture(scope="session")
def five_qubit():
    return code_preset("five_qubit")


@pytest.fixture(scope="session")
def steane():
    return code_preset("steane")


@pytest.fixture(scope="session")
def shor():
    return code_preset("shor")


@pytest.fixture
def rng():
    return np.random.default_rng(20240813)
