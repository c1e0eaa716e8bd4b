"""Exception hierarchy.

Everything raised on purpose by this package derives from ``WeakTensionError``.
Configuration problems derive from ``ConfigError`` so the CLI can map them to a
distinct exit code.
"""


class WeakTensionError(Exception):
    """Base class for all package errors."""


class DimensionMismatch(WeakTensionError, ValueError):
    pass


class InvalidState(WeakTensionError, ValueError):
    pass


class InvalidDensity(WeakTensionError, ValueError):
    pass


class InvalidObservable(WeakTensionError, ValueError):
    pass


class OrthogonalPostselection(WeakTensionError, ValueError):
    """The post-selection probability is at or below the overlap floor."""


class BasisMismatch(WeakTensionError, ValueError):
    pass


class NotAQubit(WeakTensionError, ValueError):
    pass


class DegenerateTriangle(WeakTensionError, ValueError):
    pass


class InvalidParameter(WeakTensionError, ValueError):
    pass


class OutOfGrid(WeakTensionError, ValueError):
    pass


class CouplingTooStrong(WeakTensionError, ValueError):
    pass


class DegenerateDesign(WeakTensionError, ValueError):
    pass


class InsufficientData(WeakTensionError, ValueError):
    pass


class DegenerateProbability(WeakTensionError, ValueError):
    pass


class ConfigError(WeakTensionError):
    pass


class ParseError(ConfigError):
    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        where = f" (line {line}, column {column})" if line is not None else ""
        super().__init__(f"{message}{where}")


class ValidationError(ConfigError):
    """Carries every problem found, each tagged with a dotted field path."""

    def __init__(self, issues):
        self.issues = list(issues)
        super().__init__("; ".join(f"{field}: {msg}" for field, msg in self.issues))


class ScenarioError(WeakTensionError):
    """Engine failure while running a named scenario."""

    def __init__(self, scenario, cause):
        self.scenario = scenario
        self.cause = cause
        super().__init__(f"scenario {scenario!r}: {type(cause).__name__}: {cause}")
