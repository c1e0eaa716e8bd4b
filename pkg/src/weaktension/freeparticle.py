"""Free-particle continuous-variable example on a position grid.

Initial and final states are position eigenstates (``x = 0``) at times
``-tau/2`` and ``+tau/2``; at ``t = 0`` they are the chirps::

    <x|i> = L**-0.5 exp(+i m x^2 / (hbar tau))
    <x|f> = L**-0.5 exp(-i m x^2 / (hbar tau))

with ``L`` fixed to one length unit. Their weak conditional density of
position is ``sqrt(2m/(pi hbar tau)) exp(i (2 m x^2/(hbar tau) - pi/4))``.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidParameter, OutOfGrid
from .hilbert import arg


class Which(str, enum.Enum):
    INITIAL = "initial"
    FINAL = "final"


@dataclass(frozen=True, eq=False)
class FreeParticleScenario:
    mass: float
    tau: float
    hbar: float
    x: np.ndarray

    @property
    def n(self) -> int:
        return self.x.size

    @property
    def dx(self) -> float:
        return float(self.x[1] - self.x[0])

    @property
    def x_max(self) -> float:
        return float(self.x[-1])

    @property
    def chirp_rate(self) -> float:
        """``m / (hbar tau)``."""
        return self.mass / (self.hbar * self.tau)


@dataclass(frozen=True, eq=False)
class SampledWavefunction:
    values: np.ndarray
    which: Which


@dataclass(frozen=True, eq=False)
class ActionCurve:
    x: np.ndarray
    wrapped: np.ndarray
    unwrapped: np.ndarray


def build_scenario(mass: float, tau: float, hbar: float, x_max: float, n: int) -> FreeParticleScenario:
    for name, value in (("mass", mass), ("tau", tau), ("hbar", hbar), ("x_max", x_max)):
        if not (math.isfinite(value) and value > 0):
            raise InvalidParameter(f"{name} must be positive and finite, got {value!r}")
    if int(n) != n or n < 16:
        raise InvalidParameter(f"grid needs at least 16 points, got {n!r}")
    x = np.linspace(-x_max, x_max, int(n))
    x.setflags(write=False)
    return FreeParticleScenario(float(mass), float(tau), float(hbar), x)


def _sign(which) -> float:
    return 1.0 if Which(which) is Which.INITIAL else -1.0


def wavefunction(s: FreeParticleScenario, which, x) -> np.ndarray:
    """Chirped wavefunction evaluated at arbitrary positions."""
    x = np.asarray(x, dtype=float)
    return np.exp(1j * _sign(which) * s.chirp_rate * x**2)


def sampled_wavefunction(s: FreeParticleScenario, which) -> SampledWavefunction:
    values = wavefunction(s, which, s.x)
    values.setflags(write=False)
    return SampledWavefunction(values, Which(which))


def weak_density(s: FreeParticleScenario, x):
    x = np.asarray(x, dtype=float)
    k = s.chirp_rate
    value = math.sqrt(2 * k / math.pi) * np.exp(1j * (2 * k * x**2 - math.pi / 4))
    if value.ndim == 0:
        return complex(value)
    return value


def _tail(a: float, x0: float, terms: int = 4) -> complex:
    """Asymptotic ``int_{x0}^inf exp(i a x^2) dx`` from repeated integration by parts."""
    total = 0j
    coeff = 1.0
    for n in range(terms):
        total += coeff / ((2j * a) ** (n + 1) * x0 ** (2 * n + 1))
        coeff *= 2 * n + 1
    return -np.exp(1j * a * x0**2) * total


def grid_overlap(s: FreeParticleScenario, tail_correction: bool = True) -> complex:
    """``<f|i>`` from the sampled wavefunctions.

    Midpoint sum with one cell of width ``dx`` centred on each sample. The
    window is finite, so by default the closed-form oscillatory tails beyond
    the outer cell edges are added from their asymptotic series.
    """
    f = sampled_wavefunction(s, Which.FINAL).values
    i = sampled_wavefunction(s, Which.INITIAL).values
    total = complex(np.sum(f.conj() * i) * s.dx)
    if tail_correction:
        edge = s.x_max + s.dx / 2
        total += 2 * _tail(2 * s.chirp_rate, edge)
    return total


def grid_weak_density(s: FreeParticleScenario, tail_correction: bool = True) -> np.ndarray:
    """``<f|x><x|i> / <f|i>`` on the grid, with the overlap from ``grid_overlap``."""
    f = sampled_wavefunction(s, Which.FINAL).values
    i = sampled_wavefunction(s, Which.INITIAL).values
    return f.conj() * i / grid_overlap(s, tail_correction)


def _unwrap_from_vertex(x: np.ndarray, wrapped: np.ndarray) -> np.ndarray:
    centre = int(np.argmin(np.abs(x)))
    right = np.unwrap(wrapped[centre:])
    left = np.unwrap(wrapped[: centre + 1][::-1])[::-1]
    return np.concatenate([left[:-1], right])


def action_curve(s: FreeParticleScenario) -> ActionCurve:
    """Phase ``S(x)`` of the weak density on the grid, wrapped and unwrapped.

    Unwrapping continues to the nearest branch outward from the sample closest
    to ``x = 0``.
    """
    wrapped = arg(weak_density(s, s.x))
    return ActionCurve(s.x, wrapped, _unwrap_from_vertex(s.x, wrapped))


def momentum_difference(s: FreeParticleScenario, x):
    """``-hbar dS/dx = -4 m x / tau``."""
    return -4 * s.mass * np.asarray(x, dtype=float) / s.tau


def momentum_difference_numeric(s: FreeParticleScenario, curve: ActionCurve | None = None) -> np.ndarray:
    """``-hbar dS/dx`` from the unwrapped action curve by finite differences."""
    curve = action_curve(s) if curve is None else curve
    return -s.hbar * np.gradient(curve.unwrapped, s.dx, edge_order=2)


def weak_momentum(s: FreeParticleScenario, which, x: float, dx_probe: float = 1e-3) -> float:
    """``hbar`` times the central-difference phase gradient of the wavefunction at ``x``."""
    if not (s.x[0] + dx_probe <= x <= s.x[-1] - dx_probe):
        raise OutOfGrid(f"x = {x} is not interior to the grid for probe {dx_probe}")
    ahead, behind = wavefunction(s, which, [x + dx_probe, x - dx_probe])
    return float(s.hbar * arg(ahead * behind.conjugate()) / (2 * dx_probe))


def phase_space_area(s: FreeParticleScenario, x: float) -> float:
    """Area, in units of ``hbar``, of the phase-space triangle formed by the three states.

    Vertices: the crossing of the two momentum lines ``P_i = 2 m x/tau`` and
    ``P_f = -2 m x/tau`` at the origin, and their intersections with the
    vertical line of the position eigenstate at ``x``. Shoelace formula.
    """
    slope = 2 * s.mass / s.tau
    pts = [(0.0, 0.0), (x, slope * x), (x, -slope * x)]
    twice = sum(x1 * y2 - x2 * y1 for (x1, y1), (x2, y2) in zip(pts, pts[1:] + pts[:1]))
    return abs(twice) / 2 / s.hbar


_GAUSS_NODES, _GAUSS_WEIGHTS = np.polynomial.legendre.leggauss(24)


def density_normalization_check(s: FreeParticleScenario, window: float) -> complex:
    """Integral of the weak density over ``[-window, window]``.

    Tends to ``1`` as the window grows. Evaluated with Gauss-Legendre panels
    whose width keeps the phase change per panel below one radian.
    """
    if not (math.isfinite(window) and 0 <= window <= s.x_max):
        raise InvalidParameter(f"window must lie in [0, x_max={s.x_max}], got {window!r}")
    if window == 0:
        return 0j
    k = s.chirp_rate
    panels = max(1, math.ceil(2 * k * window**2))
    edges = window * np.sqrt(np.linspace(0.0, 1.0, panels + 1))
    lo, hi = edges[:-1, None], edges[1:, None]
    nodes = 0.5 * (hi - lo) * _GAUSS_NODES + 0.5 * (hi + lo)
    weights = 0.5 * (hi - lo) * _GAUSS_WEIGHTS
    half = np.sum(weights * weak_density(s, nodes))
    return complex(2 * half)


def stationary_phase_envelope(s: FreeParticleScenario, window: float) -> float:
    """Leading-order bound on ``|partial - 1|`` from the two oscillatory tails."""
    k = s.chirp_rate
    return math.sqrt(2 * k / math.pi) / (2 * k * window)
