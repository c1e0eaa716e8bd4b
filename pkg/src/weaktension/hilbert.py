"""Finite-dimensional Hilbert space primitives.

States are normalized complex vectors, mixed states are density operators and
observables are always given in spectral form (eigenvalues plus an
orthonormal eigenbasis). Unitary evolution ``exp(-i phi A)`` is evaluated as
the spectral sum ``sum_m exp(-i phi A_m) |m><m|``, so no eigensolver or matrix
exponential is needed anywhere in the package.

All objects are immutable; their arrays are flagged read-only.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence, Union

import numpy as np

from . import policy
from .errors import (
    DimensionMismatch,
    InvalidDensity,
    InvalidObservable,
    InvalidState,
)


def _frozen(array) -> np.ndarray:
    array = np.array(array, dtype=complex)
    array.setflags(write=False)
    return array


def wrap_phase(angle):
    """Map angles into (-pi, pi]."""
    wrapped = np.pi - np.mod(np.pi - np.asarray(angle, dtype=float), 2 * np.pi)
    if np.ndim(wrapped) == 0:
        return float(wrapped)
    return wrapped


def arg(z):
    """Complex argument on the branch (-pi, pi]."""
    angle = np.angle(z)
    angle = np.where(angle <= -np.pi, np.pi, angle)
    if np.ndim(angle) == 0:
        return float(angle)
    return angle


@dataclass(frozen=True, eq=False)
class StateVector:
    """A normalized pure state. Amplitudes are renormalized on construction."""

    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.array(self.amplitudes, dtype=complex).reshape(-1)
        if amps.size < 2:
            raise InvalidState(f"state dimension must be at least 2, got {amps.size}")
        if not np.all(np.isfinite(amps)):
            raise InvalidState("state amplitudes must be finite")
        norm = np.linalg.norm(amps)
        if norm < policy.current().construct_tol:
            raise InvalidState("cannot normalize a zero vector")
        object.__setattr__(self, "amplitudes", _frozen(amps / norm))

    @property
    def dim(self) -> int:
        return self.amplitudes.size

    def __len__(self):
        return self.dim

    def __eq__(self, other):
        if not isinstance(other, StateVector):
            return NotImplemented
        return np.array_equal(self.amplitudes, other.amplitudes)

    __hash__ = None

    def projector(self) -> np.ndarray:
        return np.outer(self.amplitudes, self.amplitudes.conj())

    def with_phase(self, theta: float) -> "StateVector":
        return StateVector(np.exp(1j * theta) * self.amplitudes)


def basis_state(dim: int, k: int) -> StateVector:
    amps = np.zeros(dim, dtype=complex)
    amps[k] = 1.0
    return StateVector(amps)


def uniform_superposition(dim: int) -> StateVector:
    return StateVector(np.ones(dim, dtype=complex))


_S = 1 / math.sqrt(2)
_QUBIT_STATES = {
    "0": (1, 0),
    "1": (0, 1),
    "+": (_S, _S),
    "-": (_S, -_S),
    "+i": (_S, 1j * _S),
    "-i": (_S, -1j * _S),
}


def qubit(label: str) -> StateVector:
    """Named qubit states: ``0``, ``1``, ``+``, ``-``, ``+i``, ``-i``."""
    try:
        return StateVector(_QUBIT_STATES[label])
    except KeyError:
        raise InvalidState(f"unknown qubit label {label!r}") from None


@dataclass(frozen=True, eq=False)
class DensityOperator:
    """Hermitian, unit-trace, positive semidefinite operator.

    Positivity is checked with a witness: ``<v|rho|v>`` over the basis
    vectors, all pairwise superpositions with relative phases 1, i, -1, -i,
    and a fixed set of seeded random vectors. This catches gross violations
    without an eigendecomposition; it is not a proof of positivity.
    """

    entries: np.ndarray

    def __post_init__(self):
        rho = np.array(self.entries, dtype=complex)
        if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
            raise InvalidDensity(f"density operator must be square, got shape {rho.shape}")
        if rho.shape[0] < 2:
            raise InvalidDensity("density operator dimension must be at least 2")
        if not np.all(np.isfinite(rho)):
            raise InvalidDensity("density operator entries must be finite")
        tol = policy.current().construct_tol
        herm = np.max(np.abs(rho - rho.conj().T))
        if herm > tol:
            raise InvalidDensity(f"not Hermitian (max deviation {herm:.3e})")
        trace = np.trace(rho).real
        if abs(trace - 1) > tol:
            raise InvalidDensity(f"trace is {trace!r}, expected 1")
        worst = psd_witness(rho)
        if worst < -policy.current().psd_tol:
            raise InvalidDensity(f"not positive semidefinite (witness {worst:.3e})")
        object.__setattr__(self, "entries", _frozen(rho))

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    @classmethod
    def from_state(cls, state: StateVector) -> "DensityOperator":
        return cls(state.projector())

    @classmethod
    def mixture(cls, weights: Sequence[float], states: Sequence[StateVector]) -> "DensityOperator":
        weights = np.asarray(weights, dtype=float)
        if len(weights) != len(states) or len(states) == 0:
            raise InvalidDensity("mixture needs one weight per state")
        if np.any(weights < 0) or weights.sum() <= 0:
            raise InvalidDensity("mixture weights must be non-negative with positive sum")
        weights = weights / weights.sum()
        _check_dims(*states)
        rho = sum(w * s.projector() for w, s in zip(weights, states))
        return cls(rho)

    @classmethod
    def maximally_mixed(cls, dim: int) -> "DensityOperator":
        return cls(np.eye(dim) / dim)

    def purity(self) -> float:
        return float(np.trace(self.entries @ self.entries).real)


def _psd_probes(dim: int) -> np.ndarray:
    probes = [np.eye(dim, dtype=complex)]
    pairs = []
    for j in range(dim):
        for k in range(j + 1, dim):
            for phase in (1, 1j, -1, -1j):
                v = np.zeros(dim, dtype=complex)
                v[j] = 1
                v[k] = phase
                pairs.append(v / math.sqrt(2))
    if pairs:
        probes.append(np.array(pairs))
    pol = policy.current()
    rng = np.random.default_rng(pol.psd_probe_seed)
    rand = rng.normal(size=(pol.psd_random_probes, dim)) + 1j * rng.normal(size=(pol.psd_random_probes, dim))
    probes.append(rand / np.linalg.norm(rand, axis=1, keepdims=True))
    return np.vstack(probes)


def psd_witness(rho: np.ndarray) -> float:
    """Smallest ``<v|rho|v>`` over the deterministic probe set."""
    probes = _psd_probes(rho.shape[0])
    values = np.einsum("ki,ij,kj->k", probes.conj(), rho, probes).real
    return float(values.min())


@dataclass(frozen=True)
class ObservableReport:
    orthonormality_violation: float
    completeness_violation: float
    passed: bool


@dataclass(frozen=True, eq=False)
class SpectralObservable:
    """Observable ``A = sum_m A_m |m><m|``.

    ``vectors`` holds the eigenvectors as columns. Construction only checks
    shapes; call ``validate_observable`` (or any operation that needs a
    valid basis) for the orthonormality and completeness checks.
    Eigenvalues may repeat.
    """

    eigenvalues: np.ndarray
    vectors: np.ndarray
    name: str = field(default="", compare=False)

    def __post_init__(self):
        values = np.array(self.eigenvalues, dtype=float).reshape(-1)
        vectors = np.array(self.vectors, dtype=complex)
        if vectors.ndim != 2 or vectors.shape[0] != vectors.shape[1]:
            raise InvalidObservable(f"eigenvector matrix must be square, got shape {vectors.shape}")
        if values.size != vectors.shape[1]:
            raise InvalidObservable(
                f"{values.size} eigenvalues for {vectors.shape[1]} eigenvectors"
            )
        if vectors.shape[0] < 2:
            raise InvalidObservable("observable dimension must be at least 2")
        if not (np.all(np.isfinite(values)) and np.all(np.isfinite(vectors))):
            raise InvalidObservable("observable entries must be finite")
        values.setflags(write=False)
        object.__setattr__(self, "eigenvalues", values)
        object.__setattr__(self, "vectors", _frozen(vectors))

    @classmethod
    def from_states(cls, eigenvalues: Sequence[float], states: Sequence[StateVector], name: str = ""):
        _check_dims(*states)
        return cls(eigenvalues, np.column_stack([s.amplitudes for s in states]), name=name)

    @property
    def dim(self) -> int:
        return self.vectors.shape[0]

    @property
    def eigenbasis(self) -> list[StateVector]:
        return [StateVector(self.vectors[:, m]) for m in range(self.dim)]

    def matrix(self) -> np.ndarray:
        return (self.vectors * self.eigenvalues) @ self.vectors.conj().T

    def unitary(self, phi: float) -> np.ndarray:
        """``exp(-i phi A)`` as a spectral sum."""
        phases = np.exp(-1j * float(phi) * self.eigenvalues)
        return (self.vectors * phases) @ self.vectors.conj().T

    @cached_property
    def report(self) -> ObservableReport:
        gram = self.vectors.conj().T @ self.vectors
        ortho = float(np.max(np.abs(gram - np.eye(self.dim))))
        completeness = float(np.max(np.abs(self.vectors @ self.vectors.conj().T - np.eye(self.dim))))
        tol = policy.current().validate_tol
        return ObservableReport(ortho, completeness, ortho < tol and completeness < tol)


def validate_observable(obs: SpectralObservable) -> ObservableReport:
    return obs.report


def require_valid(obs: SpectralObservable) -> SpectralObservable:
    report = obs.report
    if not report.passed:
        raise InvalidObservable(
            f"eigenbasis is not orthonormal and complete "
            f"(orthonormality {report.orthonormality_violation:.3e}, "
            f"completeness {report.completeness_violation:.3e})"
        )
    return obs


def pauli(axis: str) -> SpectralObservable:
    """Pauli observable in spectral form; eigenvalue +1 listed first."""
    axis = axis.lower().removeprefix("pauli_")
    plus, minus = {"x": ("+", "-"), "y": ("+i", "-i"), "z": ("0", "1")}[axis]
    return SpectralObservable.from_states([1.0, -1.0], [qubit(plus), qubit(minus)], name=f"pauli_{axis}")


def _check_dims(*objs):
    dims = {o.dim for o in objs}
    if len(dims) > 1:
        raise DimensionMismatch(f"dimension mismatch: {sorted(dims)}")


def inner_product(a: StateVector, b: StateVector) -> complex:
    """``<a|b>``, conjugating the first argument."""
    _check_dims(a, b)
    return complex(np.vdot(a.amplitudes, b.amplitudes))


def evolve(state: StateVector, obs: SpectralObservable, phi: float) -> StateVector:
    _check_dims(state, obs)
    require_valid(obs)
    return StateVector(obs.unitary(phi) @ state.amplitudes)


State = Union[StateVector, DensityOperator]


def transition_probability(initial: State, final: StateVector) -> float:
    """``|<f|i>|^2`` for pure states or ``<f|rho|f>`` for density operators."""
    _check_dims(initial, final)
    if isinstance(initial, DensityOperator):
        f = final.amplitudes
        p = np.vdot(f, initial.entries @ f).real
    else:
        p = abs(np.vdot(final.amplitudes, initial.amplitudes)) ** 2
    return float(min(max(p, 0.0), 1.0))


def completeness_sum(state: StateVector, obs: SpectralObservable) -> float:
    """``sum_m |<m|s>|^2``; equals 1 for a complete basis."""
    _check_dims(state, obs)
    return float(np.sum(np.abs(obs.vectors.conj().T @ state.amplitudes) ** 2))
