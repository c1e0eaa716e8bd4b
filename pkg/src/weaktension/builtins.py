"""Named scenarios shipped with the tool."""
from __future__ import annotations

import copy
import json

from .errors import ConfigError

_BUILTINS = {
    "octant": {
        "name": "octant",
        "kind": "triple",
        "states": {"i": "+i", "f": "+"},
        "observable": {"preset": "pauli_z"},
    },
    "octant_response": {
        "name": "octant_response",
        "kind": "response_sweep",
        "states": {"i": "+i", "f": "+"},
        "observable": {"preset": "pauli_z"},
        "parameters": {"phis": "linspace(-2*pi, 2*pi, 101)"},
    },
    "mixed_halfqubit": {
        "name": "mixed_halfqubit",
        "kind": "response_sweep",
        "states": {"f": "+"},
        "density": [[0.5, 0], [0, 0.5]],
        "observable": {"preset": "pauli_z"},
        "parameters": {"phis": "linspace(-pi, pi, 101)"},
    },
    "tension_sweep": {
        "name": "tension_sweep",
        "kind": "tension_sweep",
        "states": {"i": [0.8660254037844387, 0.5], "f": "+"},
        "observable": {"preset": "pauli_z"},
        "parameters": {"phis": "linspace(-pi, pi, 73)"},
    },
    "free_particle_default": {
        "name": "free_particle_default",
        "kind": "cv",
        "parameters": {"mass": 1, "tau": 1, "hbar": 1, "x_max": 3, "n": 601},
    },
    "montecarlo_octant": {
        "name": "montecarlo_octant",
        "kind": "montecarlo",
        "states": {"i": "+i", "f": "+"},
        "observable": {"preset": "pauli_z"},
        "parameters": {"w": [0.5, 0.5], "eps": [0.01, -0.01], "n": 1000000, "seed": 20110917,
                       "delta_phi": 0.01, "replications": 1},
    },
    "reconstruct_plus_i": {
        "name": "reconstruct_plus_i",
        "kind": "reconstruct",
        "states": {"i": "+i"},
        "observable": {"preset": "pauli_z"},
    },
}

DESCRIPTIONS = {
    "octant": "weak conditionals, actions and tensions for |+i> -> |+> in the Z basis",
    "octant_response": "predicted vs exact response of the octant triple on [-2pi, 2pi]",
    "mixed_halfqubit": "mixed-state response bound for rho = I/2, f = |+>, Z",
    "tension_sweep": "tensions of |0>, |1> as a state at polar angle pi/3 is rotated about the Z axis",
    "free_particle_default": "chirped free-particle weak density on x in [-3, 3], 601 points",
    "montecarlo_octant": "sampled real and imaginary weak values of Z for the octant triple",
    "reconstruct_plus_i": "direct wavefunction reconstruction of |+i> in the Z basis",
}


def list_scenarios() -> dict[str, str]:
    return dict(DESCRIPTIONS)


def builtin_document(name: str) -> dict:
    try:
        return copy.deepcopy(_BUILTINS[name])
    except KeyError:
        raise ConfigError(f"unknown builtin scenario {name!r}; try 'weaktension list'") from None


def builtin_text(name: str) -> str:
    return json.dumps(builtin_document(name), indent=2)
