"""Scenario configuration: parsing, validation and canonical serialization.

A scenario is one JSON document::

    {
      "name": "octant",
      "kind": "triple",
      "states": {"i": "+i", "f": [[0.7071, 0], [0.7071, 0]]},
      "observable": {"preset": "pauli_z"},
      "parameters": {},
      "output": {"format": "csv"}
    }

Complex numbers are ``[re, im]`` pairs (plain reals are accepted). A state is
a list of complex amplitudes or a qubit label (``0``, ``1``, ``+``, ``-``,
``+i``, ``-i``). Numeric parameters may be expressions in ``pi`` such as
``"-pi/4"``, and grids may be written ``"linspace(-pi, pi, 101)"``.
See the README for the fields each ``kind`` requires.
"""
from __future__ import annotations

import ast
import hashlib
import json
import math
import operator
import re
from dataclasses import dataclass, field
from typing import Any, Optional

import numpy as np

from .errors import InvalidDensity, InvalidObservable, InvalidState, ParseError, ValidationError
from .hilbert import DensityOperator, SpectralObservable, StateVector, pauli, qubit, require_valid

KINDS = ("triple", "response_sweep", "tension_sweep", "cv", "montecarlo", "reconstruct")
PRESETS = ("pauli_x", "pauli_y", "pauli_z")
FORMATS = ("csv", "json")

# state names each kind needs; "i" may be replaced by a density for response_sweep
REQUIRED_STATES = {
    "triple": ("i", "f"),
    "response_sweep": ("f",),
    "tension_sweep": ("i", "f"),
    "cv": (),
    "montecarlo": ("i", "f"),
    "reconstruct": ("i",),
}

DEFAULTS = {
    "triple": {},
    "response_sweep": {"phis": "linspace(-pi, pi, 101)"},
    "tension_sweep": {"phis": "linspace(-pi, pi, 73)"},
    "cv": {"mass": 1.0, "tau": 1.0, "hbar": 1.0, "x_max": 3.0, "n": 601},
    "montecarlo": {"w": [0.5, 0.5], "eps": [0.01, -0.01], "n": 1000000, "seed": 0,
                   "delta_phi": 0.01, "replications": 1},
    "reconstruct": {},
}

_INT_PARAMS = {"n", "seed", "replications"}
_GRID_PARAMS = {"phis"}
_LIST_PARAMS = {"w", "eps"}

_OPS = {
    ast.Add: operator.add, ast.Sub: operator.sub, ast.Mult: operator.mul,
    ast.Div: operator.truediv, ast.Pow: operator.pow,
    ast.USub: operator.neg, ast.UAdd: operator.pos,
}
_NAMES = {"pi": math.pi}
_LINSPACE = re.compile(r"^\s*linspace\s*\((.*)\)\s*$")


def evaluate_number(value) -> float:
    """Evaluate a number or an arithmetic expression in ``pi``."""
    if isinstance(value, bool):
        raise ValueError("booleans are not numbers")
    if isinstance(value, (int, float)):
        return float(value)
    if not isinstance(value, str):
        raise ValueError(f"expected a number or expression, got {type(value).__name__}")

    def ev(node):
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)) and not isinstance(node.value, bool):
            return float(node.value)
        if isinstance(node, ast.Name) and node.id in _NAMES:
            return _NAMES[node.id]
        if isinstance(node, ast.BinOp) and type(node.op) in _OPS:
            return _OPS[type(node.op)](ev(node.left), ev(node.right))
        if isinstance(node, ast.UnaryOp) and type(node.op) in _OPS:
            return _OPS[type(node.op)](ev(node.operand))
        raise ValueError(f"unsupported expression {value!r}")

    try:
        tree = ast.parse(value.strip(), mode="eval")
    except SyntaxError:
        raise ValueError(f"cannot parse expression {value!r}") from None
    result = ev(tree)
    if not math.isfinite(result):
        raise ValueError(f"expression {value!r} is not finite")
    return result


def expand_grid(value) -> list[float]:
    """A list of numbers or ``"linspace(start, stop, count)"``."""
    if isinstance(value, str):
        match = _LINSPACE.match(value)
        if not match:
            raise ValueError(f"grid must be a list or linspace(start, stop, count), got {value!r}")
        parts = [p.strip() for p in match.group(1).split(",")]
        if len(parts) != 3:
            raise ValueError("linspace needs exactly three arguments")
        start, stop = evaluate_number(parts[0]), evaluate_number(parts[1])
        count = evaluate_number(parts[2])
        if count != int(count) or count < 1:
            raise ValueError("linspace count must be a positive integer")
        return [float(v) for v in np.linspace(start, stop, int(count))]
    if isinstance(value, list) and value:
        return [evaluate_number(v) for v in value]
    raise ValueError("grid must be a non-empty list or a linspace expression")


def _complex(value) -> complex:
    if isinstance(value, list):
        if len(value) != 2:
            raise ValueError(f"complex numbers are [re, im] pairs, got {value!r}")
        return complex(evaluate_number(value[0]), evaluate_number(value[1]))
    return complex(evaluate_number(value), 0.0)


def _state_literal(value) -> StateVector:
    if isinstance(value, str):
        return qubit(value)
    if not isinstance(value, list):
        raise ValueError("a state is a list of amplitudes or a qubit label")
    return StateVector([_complex(v) for v in value])


def _canonical_state(value):
    if isinstance(value, str):
        return value
    return [[_complex(v).real, _complex(v).imag] for v in value]


@dataclass(frozen=True, eq=False)
class ScenarioConfig:
    name: str
    kind: str
    states: dict
    density: Optional[DensityOperator]
    observable: Optional[SpectralObservable]
    parameters: dict
    output_path: Optional[str]
    output_format: str
    document: dict = field(repr=False)

    def with_seed(self, seed: int) -> "ScenarioConfig":
        doc = json.loads(json.dumps(self.document))
        doc["parameters"]["seed"] = int(seed)
        return parse_document(doc)

    def serialize(self) -> str:
        return serialize(self)

    @property
    def config_hash(self) -> str:
        return hashlib.sha256(serialize(self).encode()).hexdigest()


def serialize(config: ScenarioConfig) -> str:
    return json.dumps(config.document, sort_keys=True, indent=2) + "\n"


def parse_config(text: str) -> ScenarioConfig:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, exc.lineno, exc.colno) from None
    return parse_document(doc)


def parse_document(doc: Any) -> ScenarioConfig:
    issues: list[tuple[str, str]] = []
    if not isinstance(doc, dict):
        raise ValidationError([("<root>", "scenario must be a JSON object")])

    unknown = set(doc) - {"name", "kind", "states", "density", "observable", "parameters", "output"}
    for key in sorted(unknown):
        issues.append((key, "unknown field"))

    name = doc.get("name", "scenario")
    if not isinstance(name, str):
        issues.append(("name", "must be a string"))
        name = "scenario"

    kind = doc.get("kind")
    if kind not in KINDS:
        issues.append(("kind", f"must be one of {', '.join(KINDS)}; got {kind!r}"))
        raise ValidationError(issues)

    canonical: dict[str, Any] = {"name": name, "kind": kind}

    observable = None
    obs_doc = doc.get("observable")
    if kind == "cv":
        if obs_doc is not None:
            issues.append(("observable", "not used by kind 'cv'"))
    elif obs_doc is None:
        issues.append(("observable", "missing field"))
    elif not isinstance(obs_doc, dict):
        issues.append(("observable", "must be an object"))
    elif "preset" in obs_doc:
        if set(obs_doc) != {"preset"}:
            issues.append(("observable", "a preset takes no other fields"))
        elif obs_doc["preset"] not in PRESETS:
            issues.append(("observable.preset", f"unknown preset {obs_doc['preset']!r}; known: {', '.join(PRESETS)}"))
        else:
            observable = pauli(obs_doc["preset"])
            canonical["observable"] = {"preset": obs_doc["preset"]}
    else:
        try:
            values = [evaluate_number(v) for v in obs_doc["eigenvalues"]]
            vectors = [_state_literal(v) for v in obs_doc["basis"]]
            observable = require_valid(SpectralObservable.from_states(values, vectors, name="custom"))
            canonical["observable"] = {
                "eigenvalues": values,
                "basis": [_canonical_state(v) for v in obs_doc["basis"]],
            }
        except KeyError as exc:
            issues.append((f"observable.{exc.args[0]}", "missing field"))
        except (ValueError, TypeError, InvalidObservable, InvalidState) as exc:
            issues.append(("observable", str(exc)))

    states: dict[str, StateVector] = {}
    states_doc = doc.get("states", {})
    if not isinstance(states_doc, dict):
        issues.append(("states", "must be an object mapping names to states"))
        states_doc = {}
    canonical["states"] = {}
    for key, value in states_doc.items():
        try:
            states[key] = _state_literal(value)
            canonical["states"][key] = _canonical_state(value)
        except (ValueError, TypeError, InvalidState) as exc:
            issues.append((f"states.{key}", str(exc)))

    density = None
    if "density" in doc:
        try:
            rows = doc["density"]
            matrix = [[_complex(v) for v in row] for row in rows]
            density = DensityOperator(np.array(matrix))
            canonical["density"] = [[[z.real, z.imag] for z in row] for row in matrix]
        except (ValueError, TypeError, InvalidDensity) as exc:
            issues.append(("density", str(exc)))
        if kind != "response_sweep":
            issues.append(("density", f"not used by kind {kind!r}"))

    for key in REQUIRED_STATES[kind]:
        if key not in states_doc:
            issues.append((f"states.{key}", "missing field"))
    if kind == "response_sweep" and "i" not in states_doc and "density" not in doc:
        issues.append(("states.i", "response_sweep needs states.i or a density"))
    if kind == "response_sweep" and "i" in states_doc and "density" in doc:
        issues.append(("density", "give either states.i or a density, not both"))

    if observable is not None:
        for key, s in states.items():
            if s.dim != observable.dim:
                issues.append((f"states.{key}", f"dimension {s.dim} does not match observable dimension {observable.dim}"))
        if density is not None and density.dim != observable.dim:
            issues.append(("density", f"dimension {density.dim} does not match observable dimension {observable.dim}"))
    if kind == "tension_sweep" and observable is not None and observable.dim != 2:
        issues.append(("observable", "tension_sweep needs a qubit observable"))

    params_doc = doc.get("parameters", {})
    if not isinstance(params_doc, dict):
        issues.append(("parameters", "must be an object"))
        params_doc = {}
    params: dict[str, Any] = {}
    for key in sorted(set(params_doc) - set(DEFAULTS[kind])):
        issues.append((f"parameters.{key}", f"not a parameter of kind {kind!r}"))
    for key, default in DEFAULTS[kind].items():
        value = params_doc.get(key, default)
        try:
            if key in _GRID_PARAMS:
                params[key] = expand_grid(value)
            elif key in _LIST_PARAMS:
                params[key] = [evaluate_number(v) for v in value]
            elif key in _INT_PARAMS:
                number = evaluate_number(value)
                if number != int(number) or number < 0:
                    raise ValueError(f"must be a non-negative integer, got {value!r}")
                params[key] = int(number)
            else:
                params[key] = evaluate_number(value)
        except (ValueError, TypeError) as exc:
            issues.append((f"parameters.{key}", str(exc)))
    canonical["parameters"] = params

    out_doc = doc.get("output", {})
    if not isinstance(out_doc, dict):
        issues.append(("output", "must be an object"))
        out_doc = {}
    fmt = out_doc.get("format", "csv")
    if fmt not in FORMATS:
        issues.append(("output.format", f"must be one of {', '.join(FORMATS)}"))
    path = out_doc.get("path")
    if path is not None and not isinstance(path, str):
        issues.append(("output.path", "must be a string"))
    canonical["output"] = {"format": fmt, "path": path}

    if issues:
        raise ValidationError(issues)
    return ScenarioConfig(name, kind, states, density, observable, params, path, fmt, canonical)
