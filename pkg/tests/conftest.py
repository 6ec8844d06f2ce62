import numpy as np
import pytest

from magnomech import presets


def tmsv(r):
    """Two-mode squeezed vacuum covariance matrix, ordering (x1, p1, x2, p2)."""
    c, s = np.cosh(2 * r) / 2, np.sinh(2 * r) / 2
    return np.array(
        [
            [c, 0, s, 0],
            [0, c, 0, -s],
            [s, 0, c, 0],
            [0, -s, 0, c],
        ]
    )


def passive(n, rng):
    """Random passive (beam-splitter network) symplectic matrix on n modes."""
    z = (rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    u = q * (np.diag(r) / abs(np.diag(r)))
    s = np.zeros((2 * n, 2 * n))
    s[0::2, 0::2] = u.real
    s[0::2, 1::2] = -u.imag
    s[1::2, 0::2] = u.imag
    s[1::2, 1::2] = u.real
    return s


def random_physical_cm(rng, n=3, r_max=1.5, noise_max=0.3):
    """Pure squeezed state, plus thermal noise, mixed by a beam-splitter network."""
    r = rng.uniform(0, r_max, n)
    squeeze = np.diag(np.ravel([[np.exp(-x), np.exp(x)] for x in r]))
    s = passive(n, rng) @ squeeze @ passive(n, rng)
    v = 0.5 * s @ s.T
    v = v + np.diag(np.repeat(rng.uniform(0, noise_max, n), 2))
    o = passive(n, rng)
    v = o @ v @ o.T
    return 0.5 * (v + v.T)


def rotation(theta):
    c, s = np.cos(theta), np.sin(theta)
    return np.array([[c, -s], [s, c]])


@pytest.fixture
def fig2():
    return presets.fig2_params()


@pytest.fixture
def fig2_physical():
    return presets.fig2_params("physical")


@pytest.fixture
def fig3():
    return presets.fig3_params()
