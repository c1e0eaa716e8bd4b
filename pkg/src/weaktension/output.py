"""Deterministic CSV/JSON tables. Floats are written with 17 significant digits."""
from __future__ import annotations

import io
import json
import math
from dataclasses import dataclass, field

import numpy as np


@dataclass
class OutputTable:
    columns: list
    rows: list
    metadata: dict = field(default_factory=dict)

    def column(self, name: str) -> list:
        k = self.columns.index(name)
        return [row[k] for row in self.rows]

    def to_csv(self) -> str:
        return to_csv(self)

    def to_json(self) -> str:
        return to_json(self)

    def render(self, fmt: str) -> str:
        return self.to_json() if fmt == "json" else self.to_csv()


def _scalar(value):
    if isinstance(value, (np.bool_, bool)):
        return bool(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        return float(value)
    return value


def format_value(value) -> str:
    value = _scalar(value)
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return format(value + 0.0, ".17g")
    if value is None:
        return ""
    return str(value)


def to_csv(table: OutputTable) -> str:
    buf = io.StringIO()
    for key in sorted(table.metadata):
        buf.write(f"# {key}: {_json_value(table.metadata[key])}\n")
    buf.write(",".join(table.columns) + "\n")
    for row in table.rows:
        buf.write(",".join(format_value(v) for v in row) + "\n")
    return buf.getvalue()


def _json_value(value) -> str:
    value = _scalar(value)
    if isinstance(value, bool) or value is None:
        return json.dumps(value)
    if isinstance(value, float):
        return format(value + 0.0, ".17g") if math.isfinite(value) else "null"
    if isinstance(value, (int, str)):
        return json.dumps(value)
    if isinstance(value, dict):
        items = (f"{json.dumps(str(k))}: {_json_value(v)}" for k, v in sorted(value.items()))
        return "{" + ", ".join(items) + "}"
    if isinstance(value, (list, tuple, np.ndarray)):
        return "[" + ", ".join(_json_value(v) for v in value) + "]"
    raise TypeError(f"cannot serialize {type(value).__name__}")


def to_json(table: OutputTable) -> str:
    lines = [
        "{",
        f'  "metadata": {_json_value(table.metadata)},',
        f'  "columns": {_json_value(table.columns)},',
        '  "rows": [',
    ]
    body = [f"    {_json_value(row)}" for row in table.rows]
    lines.append(",\n".join(body))
    lines.append("  ]")
    lines.append("}")
    return "\n".join(lines) + "\n"
