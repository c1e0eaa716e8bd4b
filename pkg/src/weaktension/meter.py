"""Monte Carlo simulation of weak measurements with post-selection.

The meter is described by measurement operators
``E_mu = sqrt(w_mu) (1 + eps_mu A)``. Post-selected readout statistics are
sampled from the exact Born-rule table ``|<f|E_mu|i>|^2`` rather than from its
first-order expansion, so the linear-response formulas are tested, not
assumed.

Sampling is split into fixed-size chunks, each with its own generator seeded
from ``(seed, chunk index)``. Merged counts therefore do not depend on how
many workers process the chunks.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import policy
from .errors import (
    CouplingTooStrong,
    DegenerateDesign,
    DegenerateProbability,
    InsufficientData,
    InvalidParameter,
    OrthogonalPostselection,
)
from .hilbert import SpectralObservable, StateVector, _check_dims, require_valid
from .weak import direct_response, weak_value

MAX_COUPLING = 0.05
CHUNK_SIZE = 1 << 16


@dataclass(frozen=True, eq=False)
class MeterModel:
    readouts: tuple
    w: np.ndarray
    eps: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.w, dtype=float)
        eps = np.asarray(self.eps, dtype=float)
        readouts = tuple(self.readouts)
        if not (len(readouts) == w.size == eps.size) or w.size < 2:
            raise InvalidParameter("meter needs at least two readouts with one weight and one coupling each")
        if np.any(w < 0) or abs(w.sum() - 1) > policy.current().construct_tol:
            raise InvalidParameter("readout weights must be non-negative and sum to 1")
        if abs(np.dot(w, eps)) > policy.current().construct_tol:
            raise InvalidParameter("couplings must have zero mean under the readout weights")
        w.setflags(write=False)
        eps.setflags(write=False)
        object.__setattr__(self, "readouts", readouts)
        object.__setattr__(self, "w", w)
        object.__setattr__(self, "eps", eps)

    @classmethod
    def symmetric(cls, eps: float) -> "MeterModel":
        """Two equally likely readouts with couplings ``+eps`` and ``-eps``."""
        return cls(("+", "-"), [0.5, 0.5], [eps, -eps])

    def operators(self, obs: SpectralObservable) -> list[np.ndarray]:
        a = obs.matrix()
        eye = np.eye(obs.dim)
        return [math.sqrt(w) * (eye + e * a) for w, e in zip(self.w, self.eps)]


@dataclass(frozen=True, eq=False)
class ReadoutTable:
    readouts: tuple
    probabilities: np.ndarray
    postselection: Optional[float] = None


@dataclass(frozen=True, eq=False)
class MeterCounts:
    readouts: tuple
    counts: np.ndarray
    n_total: int

    @property
    def n_postselected(self) -> int:
        return int(np.sum(self.counts))


@dataclass(frozen=True)
class EstimateReport:
    estimate: float
    std_error: float
    n_total: int
    n_postselected: int

    def z_score(self, reference: float) -> float:
        return (self.estimate - reference) / self.std_error if self.std_error > 0 else math.inf


def _check_coupling(obs: SpectralObservable, meter: MeterModel) -> None:
    strength = float(np.max(np.abs(meter.eps)) * np.max(np.abs(obs.eigenvalues)))
    if strength > MAX_COUPLING:
        raise CouplingTooStrong(f"|eps * A_max| = {strength:.3g} exceeds {MAX_COUPLING}")


def _joint_table(i: StateVector, f: StateVector, obs: SpectralObservable, meter: MeterModel):
    """Exact probabilities of (mu, f) and (mu, not f), normalized over the instrument."""
    ops = meter.operators(obs)
    after = np.array([e @ i.amplitudes for e in ops])
    total = np.sum(np.abs(after) ** 2, axis=1)
    hit = np.abs(after @ f.amplitudes.conj()) ** 2
    norm = total.sum()
    return hit / norm, (total - hit).clip(min=0) / norm


def readout_distribution(i: StateVector, f: Optional[StateVector], obs: SpectralObservable, meter: MeterModel) -> ReadoutTable:
    """Meter readout probabilities, optionally conditioned on post-selecting ``f``.

    Without post-selection this is ``w_mu (1 + 2 eps_mu <i|A|i>)``. With
    post-selection it is the exact ``|<f|E_mu|i>|^2`` normalized over ``mu``.
    """
    require_valid(obs)
    _check_coupling(obs, meter)
    if f is None:
        _check_dims(i, obs)
        mean = np.vdot(i.amplitudes, obs.matrix() @ i.amplitudes).real
        return ReadoutTable(meter.readouts, meter.w * (1 + 2 * meter.eps * mean))
    _check_dims(i, f, obs)
    hit, _ = _joint_table(i, f, obs, meter)
    post = float(hit.sum())
    if post <= policy.current().overlap_floor:
        raise OrthogonalPostselection(f"post-selection probability {post:.3e} is at or below the overlap floor")
    return ReadoutTable(meter.readouts, hit / post, post)


def first_order_readout(i: StateVector, f: StateVector, obs: SpectralObservable, meter: MeterModel) -> np.ndarray:
    """Linearized post-selected table ``w_mu (1 + 2 eps_mu Re A_w)``."""
    return meter.w * (1 + 2 * meter.eps * weak_value(i, f, obs).real)


def _chunk_counts(seed: int, chunk: int, size: int, table: np.ndarray) -> np.ndarray:
    rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(chunk,)))
    return rng.multinomial(size, table)


def simulate_trials(i: StateVector, f: StateVector, obs: SpectralObservable, meter: MeterModel,
                    n: int, seed: int, workers: int = 1) -> MeterCounts:
    """Run ``n`` measure-then-post-select trials; return readout counts of the post-selected ones."""
    if n < 0:
        raise InvalidParameter("number of trials must be non-negative")
    require_valid(obs)
    _check_coupling(obs, meter)
    _check_dims(i, f, obs)
    hit, miss = _joint_table(i, f, obs, meter)
    if hit.sum() <= policy.current().overlap_floor:
        raise OrthogonalPostselection(f"post-selection probability {hit.sum():.3e} is at or below the overlap floor")
    table = np.concatenate([hit, miss])
    table /= table.sum()
    sizes = [CHUNK_SIZE] * (n // CHUNK_SIZE)
    if n % CHUNK_SIZE:
        sizes.append(n % CHUNK_SIZE)
    jobs = [(seed, c, size, table) for c, size in enumerate(sizes)]
    if workers > 1 and len(jobs) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda job: _chunk_counts(*job), jobs))
    else:
        parts = [_chunk_counts(*job) for job in jobs]
    joint = np.sum(parts, axis=0) if parts else np.zeros(table.size, dtype=np.int64)
    return MeterCounts(meter.readouts, joint[: hit.size].astype(np.int64), int(n))


def estimate_real_weak_value(counts: MeterCounts, meter: MeterModel, min_postselected: int = 100) -> EstimateReport:
    """Least-squares fit of ``p_mu = w_mu (1 + 2 eps_mu R)`` to the post-selected frequencies.

    ``counts.counts`` may hold expected (non-integer) counts for noise-free checks.
    """
    if np.unique(meter.eps).size < 2:
        raise DegenerateDesign("all couplings are equal; the real part is not identifiable")
    counts_arr = np.asarray(counts.counts, dtype=float)
    n_post = float(counts_arr.sum())
    if n_post < min_postselected:
        raise InsufficientData(f"{n_post:g} post-selected events, need at least {min_postselected}")
    freq = counts_arr / n_post
    design = 2 * meter.w * meter.eps
    coef = design / np.dot(design, design)
    estimate = float(np.dot(coef, freq - meter.w))
    cov = (np.diag(freq) - np.outer(freq, freq)) / n_post
    variance = float(coef @ cov @ coef)
    return EstimateReport(estimate, math.sqrt(max(variance, 0.0)), counts.n_total, int(round(n_post)))


def estimate_imag_weak_value(i: StateVector, f: StateVector, obs: SpectralObservable,
                             delta_phi: float, n: int, seed: int) -> EstimateReport:
    """Half the log-derivative of the post-selection rate under ``exp(-i phi A)``.

    Two Bernoulli batches of ``n`` trials at ``phi = +delta`` and ``-delta``;
    ``estimate = (ln p(+delta) - ln p(-delta)) / (4 delta)``.
    """
    if not 1e-3 <= delta_phi <= 0.1:
        raise InvalidParameter(f"delta_phi {delta_phi} outside [1e-3, 0.1]")
    if n < 1:
        raise InsufficientData("need at least one trial per batch")
    p_plus, p_minus = direct_response(i, f, obs, [delta_phi, -delta_phi])
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    k_plus, k_minus = rng.binomial(n, [p_plus, p_minus])
    if k_plus == 0 or k_minus == 0:
        raise DegenerateProbability("a batch recorded no post-selected events")
    hat_plus, hat_minus = k_plus / n, k_minus / n
    estimate = (math.log(hat_plus) - math.log(hat_minus)) / (4 * delta_phi)
    # Jeffreys-smoothed rates keep the error positive when a batch saturates at 1
    smooth = [(k + 0.5) / (n + 1) for k in (k_plus, k_minus)]
    variance = sum((1 - p) / (n * p) for p in smooth)
    return EstimateReport(float(estimate), math.sqrt(variance) / (4 * delta_phi), 2 * n, int(k_plus + k_minus))

