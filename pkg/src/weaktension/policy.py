"""Global numeric tolerances.

All thresholds used across the package live in one frozen record. Functions
read ``current()`` at call time, so ``override`` affects every module.
"""
from __future__ import annotations

from contextlib import contextmanager
from dataclasses import asdict, dataclass, replace


@dataclass(frozen=True)
class NumericPolicy:
    construct_tol: float = 1e-12
    validate_tol: float = 1e-10
    psd_tol: float = 1e-10
    overlap_floor: float = 1e-12
    magnitude_floor: float = 1e-14
    psd_random_probes: int = 32
    psd_probe_seed: int = 20110512

    def as_dict(self) -> dict:
        return asdict(self)


_POLICY = NumericPolicy()


def current() -> NumericPolicy:
    return _POLICY


def set_policy(**changes) -> NumericPolicy:
    """Replace fields of the global policy; returns the previous policy."""
    global _POLICY
    previous = _POLICY
    _POLICY = replace(_POLICY, **changes)
    return previous


@contextmanager
def override(**changes):
    previous = set_policy(**changes)
    try:
        yield current()
    finally:
        set_policy(**previous.as_dict())
