"""Logical tension of state triples and its Bloch-sphere geometry.

The tension of ``(i, m, f)`` is the phase of the cyclic overlap product
``<f|m><m|i><i|f>`` (a Pancharatnam phase). For qubits its magnitude is half
the solid angle of the geodesic triangle spanned by the three Bloch vectors.

The cyclic product is evaluated canonically: every unordered pair of states
has one overlap computed in a fixed order (conjugated when traversed the other
way) and the three factors are multiplied in a fixed pair order. Cyclic
permutations therefore give bit-identical products and reversal gives the
bit-exact conjugate.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from . import policy
from .errors import DegenerateTriangle, NotAQubit
from .hilbert import SpectralObservable, StateVector, _check_dims, arg, require_valid, wrap_phase

# tension(i, m, f) = ORIENTATION_SIGN * solid_angle(b_i, b_m, b_f) / 2, fixed
# from the octant triple (|+i>, |0>, |+>) whose tension is -pi/4 while the
# oriented solid angle of (+y, +z, +x) is +pi/2.
ORIENTATION_SIGN = -1.0

_COINCIDENT_TOL = 1e-10
# rays whose overlap magnitude is 1 up to a few ulps are treated as equal
_SAME_RAY_TOL = 4 * np.finfo(float).eps


class TensionClass(str, enum.Enum):
    CLASSICAL_LIKE = "classical_like"
    PARADOXICAL = "paradoxical"


@dataclass(frozen=True)
class TensionReport:
    tension: float
    magnitude_class: TensionClass
    degenerate: bool
    product: complex


@dataclass(frozen=True)
class BlochVector:
    x: float
    y: float
    z: float

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z])


@dataclass(frozen=True)
class TensionAreaRecord:
    tension: float
    half_area: float
    match: bool


def classify(tension: float) -> TensionClass:
    return TensionClass.PARADOXICAL if abs(tension) >= math.pi / 2 else TensionClass.CLASSICAL_LIKE


def _key(state: StateVector) -> bytes:
    return state.amplitudes.tobytes()


def _edge(src: StateVector, dst: StateVector) -> complex:
    """``<dst|src>``, computed from the canonically ordered pair."""
    if _key(src) <= _key(dst):
        return complex(np.vdot(dst.amplitudes, src.amplitudes))
    return complex(np.vdot(src.amplitudes, dst.amplitudes)).conjugate()


def cyclic_product(i: StateVector, m: StateVector, f: StateVector) -> complex:
    """``<f|m><m|i><i|f>`` with a permutation-stable evaluation order."""
    _check_dims(i, m, f)
    edges = [(i, m), (m, f), (f, i)]
    edges.sort(key=lambda e: (tuple(sorted((_key(e[0]), _key(e[1])))), _key(e[0])))
    product = 1 + 0j
    for src, dst in edges:
        product *= _edge(src, dst)
    return product


def logical_tension(i: StateVector, m: StateVector, f: StateVector) -> TensionReport:
    product = cyclic_product(i, m, f)
    floor = policy.current().magnitude_floor
    overlaps = (abs(_edge(i, m)), abs(_edge(m, f)), abs(_edge(f, i)))
    degenerate = min(overlaps) < floor
    same_ray = max(overlaps) >= 1 - _SAME_RAY_TOL
    tension = 0.0 if degenerate or same_ray else arg(product)
    return TensionReport(tension, classify(tension), degenerate, product)


def bloch_vector(s: StateVector) -> BlochVector:
    """Bloch vector with ``x = 2 Re(conj(a) b)``, ``y = 2 Im(conj(a) b)``, ``z = |a|^2 - |b|^2``."""
    if s.dim != 2:
        raise NotAQubit(f"expected a qubit state, got dimension {s.dim}")
    a, b = s.amplitudes
    c = a.conjugate() * b
    return BlochVector(float(2 * c.real), float(2 * c.imag), float(abs(a) ** 2 - abs(b) ** 2))


def _check_triangle(a: np.ndarray, b: np.ndarray, c: np.ndarray) -> None:
    for u, v in ((a, b), (b, c), (c, a)):
        if np.linalg.norm(u - v) < _COINCIDENT_TOL:
            raise DegenerateTriangle("two vertices coincide")
        if np.linalg.norm(u + v) < _COINCIDENT_TOL:
            raise DegenerateTriangle("two vertices are antipodal")


def geodesic_triangle_area(a: BlochVector, b: BlochVector, c: BlochVector) -> float:
    """Signed solid angle of the spherical triangle ``(a, b, c)``.

    Uses ``tan(Omega/2) = a.(b x c) / (1 + a.b + b.c + c.a)``; positive for
    counter-clockwise orientation seen from outside.
    """
    a, b, c = a.as_array(), b.as_array(), c.as_array()
    _check_triangle(a, b, c)
    numerator = float(np.dot(a, np.cross(b, c)))
    denominator = 1.0 + float(np.dot(a, b) + np.dot(b, c) + np.dot(c, a))
    return 2.0 * math.atan2(numerator, denominator)


def _coincident(s: StateVector, t: StateVector) -> bool:
    return np.linalg.norm(bloch_vector(s).as_array() - bloch_vector(t).as_array()) < _COINCIDENT_TOL


def qubit_tension_consistency(i: StateVector, m: StateVector, f: StateVector, tol: float = 1e-9) -> TensionAreaRecord:
    """Compare the tension with half the oriented solid angle of the Bloch triangle.

    A triple with two coincident states has zero area and zero tension.
    """
    for s in (i, m, f):
        if s.dim != 2:
            raise NotAQubit(f"expected qubit states, got dimension {s.dim}")
    report = logical_tension(i, m, f)
    if _coincident(i, m) or _coincident(m, f) or _coincident(f, i):
        half_area = 0.0
    else:
        omega = geodesic_triangle_area(bloch_vector(i), bloch_vector(m), bloch_vector(f))
        half_area = ORIENTATION_SIGN * omega / 2
    match = abs(wrap_phase(report.tension - half_area)) <= tol
    return TensionAreaRecord(report.tension, half_area, bool(match))


def orthogonal_pair_tension_difference(i: StateVector, f: StateVector, basis: SpectralObservable) -> float:
    """``S(i, m0, f) - S(i, m1, f)`` for the two eigenstates of a qubit basis, wrapped to (-pi, pi]."""
    if basis.dim != 2 or i.dim != 2 or f.dim != 2:
        raise NotAQubit("orthogonal pair difference is defined for qubits only")
    require_valid(basis)
    m0, m1 = basis.eigenbasis
    return wrap_phase(logical_tension(i, m0, f).tension - logical_tension(i, m1, f).tension)
