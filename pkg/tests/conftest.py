import numpy as np
import pytest


def random_symmetric(rng, p, scale=1.0):
    a = rng.standard_normal((p, p)) * scale
    return (a + a.T) / 2.0


def random_orthogonal(rng, p):
    q, r = np.linalg.qr(rng.standard_normal((p, p)))
    return q * np.sign(np.diag(r))


def separated_spectrum(rng, p, min_gap=0.5):
    """Distinct positive eigenvalues in descending order with gaps >= min_gap."""
    steps = min_gap + rng.uniform(0.0, 1.0, size=p)
    return np.cumsum(steps)[::-1].copy()


def with_spectrum(rng, values):
    q = random_orthogonal(rng, len(values))
    return (q * values) @ q.T


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
