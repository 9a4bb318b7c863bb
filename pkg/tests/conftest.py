import numpy as np
import pytest

from dephaselab import dephasing, equivalence, qstate


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


def random_hermitian(rng, n, scale=1.0):
    m = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return scale * (m + m.conj().T) / 2


def random_density(rng, dims):
    d = int(np.prod(dims))
    m = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    rho = m @ m.conj().T
    return qstate.DensityMatrix(rho / np.trace(rho).real, dims)


def random_pure(rng, d=2, dims=None):
    amp = rng.normal(size=d) + 1j * rng.normal(size=d)
    return qstate.pure_state(amp, dims=dims)


@pytest.fixture
def fig3_models():
    """The canonical pair at c = 0: diagonal coupling vs pure environment."""
    pa = dephasing.QubitModelParams((0.0, 0.0, 0.0), (0.0, 0.0, 1.0), 1.0)
    pb = equivalence.construct_partner(0.0)
    return dephasing.qubit_model(pa), dephasing.qubit_model(pb)
