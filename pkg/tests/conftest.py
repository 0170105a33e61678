import numpy as np
import pytest

from app.models.domain import ToeplitzMatrix
from app.services.toeplitz_service import extreme_ray, identity


def separated_angles(rng: np.random.Generator, r: int) -> np.ndarray:
    """r angles, one per arc of length 2 pi / r, at least pi / r apart."""
    return 2 * np.pi * (np.arange(r) + 0.5 * rng.uniform(size=r)) / r


def rays(angles, weights, n: int) -> ToeplitzMatrix:
    T = ToeplitzMatrix(n, np.zeros(2 * n - 1, dtype=complex))
    for theta, weight in zip(angles, weights):
        T = T + float(weight) * extreme_ray(np.exp(1j * theta), n)
    return T


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def make_boundary(rng):
    """Singular positive Toeplitz matrices of rank r < n with known nodes."""
    def build(n: int, r: int):
        angles = separated_angles(rng, r)
        weights = rng.uniform(0.5, 2.0, size=r)
        return rays(angles, weights, n), angles, weights
    return build


@pytest.fixture
def make_positive(rng):
    """Full-rank positive Toeplitz matrices c I + sum of extreme rays."""
    def build(n: int):
        r = int(rng.integers(1, n + 1))
        T = rays(rng.uniform(0, 2 * np.pi, size=r), rng.uniform(0.2, 2.0, size=r), n)
        return T + float(rng.uniform(0.1, 1.0)) * identity(n)
    return build


@pytest.fixture
def random_hermitian(rng):
    def build(n: int) -> ToeplitzMatrix:
        upper = rng.standard_normal(n - 1) + 1j * rng.standard_normal(n - 1)
        t = np.concatenate([upper[::-1].conj(), [rng.standard_normal()], upper])
        return ToeplitzMatrix(n, t)
    return build


@pytest.fixture
def make_rays():
    return rays
