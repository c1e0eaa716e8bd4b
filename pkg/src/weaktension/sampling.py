"""Seeded random states, bases and density operators for sweeps and tests."""
from __future__ import annotations

import numpy as np

from .hilbert import DensityOperator, SpectralObservable, StateVector


def random_state(rng: np.random.Generator, dim: int) -> StateVector:
    """Haar-random pure state (normalized complex Gaussian vector)."""
    return StateVector(rng.normal(size=dim) + 1j * rng.normal(size=dim))


def random_unitary(rng: np.random.Generator, dim: int) -> np.ndarray:
    """Haar-random unitary via QR of a complex Ginibre matrix with phase fix."""
    z = (rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))


def random_observable(rng: np.random.Generator, dim: int, low=-1.0, high=1.0) -> SpectralObservable:
    eigenvalues = rng.uniform(low, high, size=dim)
    return SpectralObservable(eigenvalues, random_unitary(rng, dim), name="random")


def random_density(rng: np.random.Generator, dim: int, rank: int | None = None) -> DensityOperator:
    """Random convex mixture of at most ``dim`` pure states."""
    if rank is None:
        rank = int(rng.integers(1, dim + 1))
    states = [random_state(rng, dim) for _ in range(rank)]
    return DensityOperator.mixture(rng.dirichlet(np.ones(rank)), states)
