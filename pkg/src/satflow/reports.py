"""Structured run reports with canonical JSON and CSV rendering.

``render_json`` is deterministic: keys are sorted, indentation is fixed, and
floats carry 17 significant digits (round-trip exact), so two runs with
identical inputs produce byte-identical output.  ``wall_time_ms`` is
deliberately left null in serialized reports (timing goes to stderr) to keep
that guarantee.
"""

from __future__ import annotations

import csv
import dataclasses
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

__all__ = [
    "CheckReport",
    "RunReport",
    "render_json",
    "write_csv",
]

SCHEMA_VERSION = 1


@dataclass(frozen=True)
class CheckReport:
    """One named pass/fail check with its measured value and tolerance."""

    name: str
    value: float
    tolerance: float
    passed: bool
    note: str = ""


@dataclass
class RunReport:
    """Everything one CLI invocation produced."""

    command: str
    params: dict[str, Any] = field(default_factory=dict)
    checks: list[CheckReport] = field(default_factory=list)
    tables: dict[str, list[dict[str, Any]]] = field(default_factory=dict)
    schema_version: int = SCHEMA_VERSION
    wall_time_ms: "float | None" = None

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)


def _plain(value: Any) -> Any:
    """Convert to plain JSON-serializable data, deterministically."""
    if dataclasses.is_dataclass(value) and not isinstance(value, type):
        return {f.name: _plain(getattr(value, f.name))
                for f in dataclasses.fields(value)}
    if isinstance(value, np.ndarray):
        return [_plain(row) for row in value.tolist()]
    if isinstance(value, (np.floating,)):
        value = float(value)
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, float):
        if math.isnan(value):
            return "NaN"
        if math.isinf(value):
            return "Infinity" if value > 0 else "-Infinity"
        return value
    if isinstance(value, dict):
        return {str(key): _plain(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(item) for item in value]
    return value


def _emit(value: Any, indent: int, pieces: list[str]) -> None:
    pad = "  " * indent
    inner = "  " * (indent + 1)
    if isinstance(value, bool) or value is None:
        pieces.append("null" if value is None else ("true" if value else "false"))
    elif isinstance(value, float):
        pieces.append(format(value, ".17g"))
    elif isinstance(value, int):
        pieces.append(str(value))
    elif isinstance(value, str):
        pieces.append(json.dumps(value))
    elif isinstance(value, dict):
        if not value:
            pieces.append("{}")
            return
        pieces.append("{\n")
        for index, key in enumerate(sorted(value)):
            pieces.append(f"{inner}{json.dumps(key)}: ")
            _emit(value[key], indent + 1, pieces)
            pieces.append(",\n" if index + 1 < len(value) else "\n")
        pieces.append(pad + "}")
    elif isinstance(value, list):
        if not value:
            pieces.append("[]")
            return
        pieces.append("[\n")
        for index, item in enumerate(value):
            pieces.append(inner)
            _emit(item, indent + 1, pieces)
            pieces.append(",\n" if index + 1 < len(value) else "\n")
        pieces.append(pad + "]")
    else:  # pragma: no cover - _plain leaves no other types
        raise TypeError(f"cannot serialize {type(value).__name__}")


def render_json(report: RunReport) -> str:
    """Canonical JSON text for a report (no trailing newline).

    Keys are sorted, indentation is two spaces, and every float carries 17
    significant digits so parsing the text recovers the exact binary value.
    """
    pieces: list[str] = []
    _emit(_plain(report), 0, pieces)
    return "".join(pieces)


def _cell(value: Any) -> str:
    if isinstance(value, (float, np.floating)):
        return format(float(value), ".17g")
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return str(value)


def write_csv(path: "str | Path", rows: list[dict[str, Any]],
              columns: list[str]) -> None:
    """Write rows under a fixed column order; floats keep full precision."""
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_cell(row[name]) for name in columns])
