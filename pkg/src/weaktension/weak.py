"""Weak values, complex weak conditional probabilities and unitary response.

For a preparation ``i`` (pure, or a density operator ``rho``), a post-selected
outcome ``f`` and an orthonormal basis ``{|m>}`` the weak conditional
probabilities are::

    p(m|if) = <f|m><m|i> / <f|i>                  (pure)
    p(m|if) = <f|m><m|rho|f> / <f|rho|f>          (mixed)

They sum to one, and for pure states they predict the post-selection
probability after any unitary that is diagonal in the same basis::

    p(f; phi) = |sum_m exp(-i phi A_m) p(m|if)|^2 p(f; 0)

For mixed states the same expression is a lower bound on the true response.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import policy
from .errors import BasisMismatch, DimensionMismatch, InvalidParameter, OrthogonalPostselection
from .hilbert import (
    DensityOperator,
    SpectralObservable,
    State,
    StateVector,
    _check_dims,
    arg,
    require_valid,
    transition_probability,
    uniform_superposition,
)


@dataclass(frozen=True, eq=False)
class WeakConditionalDistribution:
    values: np.ndarray
    base_probability: float
    source: str
    basis: np.ndarray

    @property
    def dim(self) -> int:
        return self.values.size

    def total(self) -> complex:
        return complex(np.sum(self.values))


@dataclass(frozen=True, eq=False)
class ActionProfile:
    actions: np.ndarray
    defined_mask: np.ndarray


@dataclass(frozen=True, eq=False)
class ResponseCurve:
    phis: np.ndarray
    predicted: np.ndarray
    direct: np.ndarray
    satisfied: np.ndarray

    @property
    def max_deviation(self) -> float:
        return float(np.max(np.abs(self.direct - self.predicted)))


@dataclass(frozen=True)
class ImaginaryResponse:
    finite_diff: float
    weak_imag: float

    @property
    def error(self) -> float:
        return abs(self.finite_diff - self.weak_imag)


@dataclass(frozen=True)
class CurvatureCheck:
    second_deriv: float
    bound: float
    satisfied: bool


def _postselection(overlap_probability: float) -> None:
    if overlap_probability <= policy.current().overlap_floor:
        raise OrthogonalPostselection(
            f"post-selection probability {overlap_probability:.3e} is at or below the overlap floor"
        )


def _check_basis(dist: WeakConditionalDistribution, basis: SpectralObservable) -> None:
    if dist.basis.shape != basis.vectors.shape or not np.allclose(
        dist.basis, basis.vectors, rtol=0, atol=policy.current().validate_tol
    ):
        raise BasisMismatch("distribution was computed in a different basis")


def weak_value(i: StateVector, f: StateVector, obs: SpectralObservable) -> complex:
    """``<f|A|i> / <f|i>`` by direct matrix-vector arithmetic."""
    _check_dims(i, f, obs)
    overlap = np.vdot(f.amplitudes, i.amplitudes)
    _postselection(abs(overlap) ** 2)
    return complex(np.vdot(f.amplitudes, obs.matrix() @ i.amplitudes) / overlap)


def weak_conditional(i: StateVector, f: StateVector, basis: SpectralObservable) -> WeakConditionalDistribution:
    _check_dims(i, f, basis)
    require_valid(basis)
    overlap = np.vdot(f.amplitudes, i.amplitudes)
    _postselection(abs(overlap) ** 2)
    f_m = basis.vectors.T @ f.amplitudes.conj()  # <f|m>
    m_i = basis.vectors.conj().T @ i.amplitudes  # <m|i>
    values = f_m * m_i / overlap
    values.setflags(write=False)
    return WeakConditionalDistribution(values, float(abs(overlap) ** 2), "pure", basis.vectors)


def weak_conditional_mixed(rho: DensityOperator, f: StateVector, basis: SpectralObservable) -> WeakConditionalDistribution:
    """Mixed-state version: ``|i>`` is replaced by ``rho|f>`` literally."""
    _check_dims(rho, f, basis)
    require_valid(basis)
    rho_f = rho.entries @ f.amplitudes
    norm = np.vdot(f.amplitudes, rho_f).real
    _postselection(norm)
    f_m = basis.vectors.T @ f.amplitudes.conj()
    m_rho_f = basis.vectors.conj().T @ rho_f
    values = f_m * m_rho_f / norm
    values.setflags(write=False)
    return WeakConditionalDistribution(values, float(norm), "mixed", basis.vectors)


def conditional(initial: State, f: StateVector, basis: SpectralObservable) -> WeakConditionalDistribution:
    """Dispatch on pure or mixed preparation."""
    if isinstance(initial, DensityOperator):
        return weak_conditional_mixed(initial, f, basis)
    return weak_conditional(initial, f, basis)


def spectral_weak_value(dist: WeakConditionalDistribution, basis: SpectralObservable) -> complex:
    """``sum_m A_m p(m|if)``."""
    _check_basis(dist, basis)
    return complex(np.dot(basis.eigenvalues, dist.values))


def action_profile(dist: WeakConditionalDistribution) -> ActionProfile:
    """Phases ``S_m = Arg p(m|if)``; entries with ``|p| <= magnitude_floor`` are masked to 0."""
    mask = np.abs(dist.values) > policy.current().magnitude_floor
    actions = np.where(mask, arg(dist.values), 0.0)
    return ActionProfile(np.asarray(actions, dtype=float), mask)


def optimal_unitary(dist: WeakConditionalDistribution, basis: SpectralObservable) -> np.ndarray:
    """``U_max = sum_m exp(-i S_m) |m><m|``, the basis-diagonal unitary maximizing ``p(f)``."""
    _check_basis(dist, basis)
    phases = np.exp(-1j * action_profile(dist).actions)
    return (basis.vectors * phases) @ basis.vectors.conj().T


def max_overlap_probability(dist: WeakConditionalDistribution) -> float:
    return float(np.sum(np.abs(dist.values)) ** 2 * dist.base_probability)


def predict_response(dist: WeakConditionalDistribution, basis: SpectralObservable, phi):
    """Post-selection probability after ``exp(-i phi A)`` predicted from ``p(m|if)``.

    ``phi`` may be a scalar or an array. At ``phi == 0`` the base probability is
    returned exactly.
    """
    _check_basis(dist, basis)
    phis = np.asarray(phi, dtype=float)
    amplitude = np.exp(-1j * np.multiply.outer(phis, basis.eigenvalues)) @ dist.values
    result = np.abs(amplitude) ** 2 * dist.base_probability
    result = np.where(phis == 0, dist.base_probability, result)
    if result.ndim == 0:
        return float(result)
    return result


def direct_response(initial: State, f: StateVector, obs: SpectralObservable, phi):
    """Exact ``|<f|U|i>|^2`` or ``<f|U rho U^dag|f>`` with ``U = exp(-i phi A)``."""
    _check_dims(initial, f, obs)
    require_valid(obs)
    phis = np.asarray(phi, dtype=float)
    out = np.empty(phis.shape)
    for idx, p in np.ndenumerate(phis):
        # <f|U = (U^dag|f>)^dag, so only one matrix-vector product is needed
        g = obs.unitary(-p) @ f.amplitudes
        if isinstance(initial, DensityOperator):
            value = np.vdot(g, initial.entries @ g).real
        else:
            value = abs(np.vdot(g, initial.amplitudes)) ** 2
        out[idx] = value
    if out.ndim == 0:
        return float(out)
    return out


def _check_step(h: float) -> None:
    if not 1e-6 <= h <= 1e-2:
        raise InvalidParameter(f"finite-difference step {h} outside [1e-6, 1e-2]")


def imaginary_response_check(initial: State, f: StateVector, obs: SpectralObservable, h: float = 1e-3) -> ImaginaryResponse:
    """Compare half the log-derivative of ``p(f; phi)`` at 0 with ``sum_m A_m Im p(m|if)``."""
    _check_step(h)
    dist = conditional(initial, f, obs)
    plus, minus = direct_response(initial, f, obs, [h, -h])
    finite_diff = (np.log(plus) - np.log(minus)) / (4 * h)
    weak_imag = float(np.dot(obs.eigenvalues, dist.values.imag))
    return ImaginaryResponse(float(finite_diff), weak_imag)


def curvature_bound(dist: WeakConditionalDistribution, basis: SpectralObservable) -> float:
    """Lower bound on the second derivative of ``p(f; phi)`` at ``phi = 0``."""
    _check_basis(dist, basis)
    a = basis.eigenvalues
    spread = np.dot(a**2, dist.values.real) - abs(np.dot(a, dist.values)) ** 2
    return float(-2 * spread * dist.base_probability)


def curvature_bound_check(initial: State, f: StateVector, obs: SpectralObservable, h: float = 1e-3) -> CurvatureCheck:
    _check_step(h)
    dist = conditional(initial, f, obs)
    p = direct_response(initial, f, obs, [-2 * h, -h, 0.0, h, 2 * h])
    second = (-p[0] + 16 * p[1] - 30 * p[2] + 16 * p[3] - p[4]) / (12 * h * h)
    bound = curvature_bound(dist, obs)
    slack = max(1e-6, 100 * h * h)
    return CurvatureCheck(float(second), bound, bool(second >= bound - slack))


def mixed_response_bound_check(initial: State, f: StateVector, obs: SpectralObservable, phis: Sequence[float]) -> ResponseCurve:
    """Exact response versus the weak-conditional prediction on a phi grid.

    The prediction never exceeds the exact response; for pure preparations
    they coincide.
    """
    phis = np.asarray(phis, dtype=float)
    dist = conditional(initial, f, obs)
    predicted = predict_response(dist, obs, phis)
    direct = direct_response(initial, f, obs, phis)
    satisfied = direct >= predicted - policy.current().validate_tol
    return ResponseCurve(phis, predicted, direct, satisfied)


def reconstruct_wavefunction(i: StateVector, basis: SpectralObservable) -> np.ndarray:
    """Weak conditional probabilities with the uniform superposition post-selected.

    Since ``<f|m>`` is the same for every ``m``, the result is proportional to
    the amplitudes ``<m|i>``.
    """
    require_valid(basis)
    f_amps = basis.vectors @ uniform_superposition(basis.dim).amplitudes
    return weak_conditional(i, StateVector(f_amps), basis).values.copy()


def reconstructed_state(amplitudes, basis: SpectralObservable) -> StateVector:
    """Normalized state ``sum_m c_m |m>`` from reconstructed basis amplitudes."""
    amplitudes = np.asarray(amplitudes, dtype=complex)
    if amplitudes.size != basis.dim:
        raise DimensionMismatch(f"{amplitudes.size} amplitudes for a {basis.dim}-dimensional basis")
    return StateVector(basis.vectors @ amplitudes)


def reconstruction_fidelity(amplitudes, i: StateVector, basis: SpectralObservable) -> float:
    return transition_probability(reconstructed_state(amplitudes, basis), i)
