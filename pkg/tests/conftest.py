import numpy as np
import pytest

from isingscreen.model import model_from_edges, new_model


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def path3():
    """Path 0-1-2 with couplings 0.3, 0.7 and field (0.1, 0, 0)."""
    return model_from_edges(3, [(0, 1, 0.3), (1, 2, 0.7)], theta=[0.1, 0.0, 0.0])


def random_symmetric(n, rng, scale=0.5):
    A = np.triu(rng.uniform(-scale, scale, (n, n)), 1)
    return A + A.T


def random_model(n, rng, scale=0.5, theta_scale=0.0):
    theta = rng.uniform(-theta_scale, theta_scale, n) if theta_scale else None
    return new_model(random_symmetric(n, rng, scale), theta)


def empirical_tv(samples, dist):
    idx = (samples > 0).astype(np.int64) @ (1 << np.arange(dist.n - 1, -1, -1))
    freq = np.bincount(idx, minlength=2**dist.n) / len(samples)
    return 0.5 * np.abs(freq - dist.probabilities).sum()
