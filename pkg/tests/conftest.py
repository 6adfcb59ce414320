from __future__ import annotations

from itertools import product

import numpy as np
import pytest


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240817)


def brute_theta(z, B, box: int = 12) -> complex:
    """Direct lattice-sum oracle for the theta series (no truncation logic)."""
    z = np.asarray(z, dtype=complex).reshape(-1)
    B = np.asarray(B, dtype=complex)
    g = len(z)
    total = 0.0 + 0.0j
    for N in product(range(-box, box + 1), repeat=g):
        N = np.asarray(N, dtype=float)
        total += np.exp(1j * np.pi * (B @ N) @ N + 2j * np.pi * (N @ z))
    return total


def random_period_matrix(rng: np.random.Generator, g: int) -> np.ndarray:
    """Symmetric B with comfortably positive-definite imaginary part."""
    X = rng.normal(size=(g, g)) * 0.3
    X = (X + X.T) / 2.0
    A = rng.normal(size=(g, g)) * 0.3
    Y = A @ A.T + np.eye(g)
    return X + 1j * Y


def random_jacobian_data(rng: np.random.Generator, g: int):
    from latgreen import JacobianSpectralData

    return JacobianSpectralData(
        B=random_period_matrix(rng, g),
        A_gamma=rng.normal(size=(g, g)) * 0.4 + 1j * rng.normal(size=(g, g)) * 0.1,
        K=rng.normal(size=g) * 0.4 + 1j * rng.normal(size=g) * 0.1,
        Delta_P=rng.normal(size=g) * 0.5 + 1j * rng.normal(size=g) * 0.05,
        Delta_Q=rng.normal(size=g) * 0.5 + 1j * rng.normal(size=g) * 0.05,
    )
