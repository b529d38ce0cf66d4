import numpy as np
import pytest

from mixedcollage.polynomials import laplacian, manufactured_f, reference_psi0


@pytest.fixture(scope="session")
def psi0():
    return reference_psi0()


@pytest.fixture(scope="session")
def w0(psi0):
    return -laplacian(psi0)


@pytest.fixture(scope="session")
def f_quarter(psi0):
    return manufactured_f(psi0, 0.25)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
