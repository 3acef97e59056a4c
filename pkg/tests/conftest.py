import numpy as np
import pytest


def random_unitary(n, rng):
    a = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    q, r = np.linalg.qr(a)
    d = np.diag(r)
    return q * (d / np.abs(d))


def random_hermitian(n, rng, scale=1.0):
    a = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return scale * 0.5 * (a + a.conj().T)


def unitary_with_phases(phases, rng):
    """Unitary with prescribed eigenphases and a random eigenbasis."""
    n = len(phases)
    v = random_unitary(n, rng)
    return (v * np.exp(1j * np.asarray(phases))) @ v.conj().T


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
