"""Canonical report serialization: byte-identical output for identical inputs.

Floats are rendered with %.17g (17 significant digits, value-preserving);
keys are emitted in sorted order; no timestamps or environment data enter a
report, so reruns diff clean.
"""

from __future__ import annotations

import numpy as np


def format_float(x: float) -> str:
    if x != x or x in (float("inf"), float("-inf")):
        raise ValueError(f"non-finite value {x!r} in report")
    return format(float(x), ".17g")


def _encode(obj, parts: list[str]) -> None:
    if obj is None:
        parts.append("null")
    elif obj is True:
        parts.append("true")
    elif obj is False:
        parts.append("false")
    elif isinstance(obj, (int, np.integer)) and not isinstance(obj, bool):
        parts.append(str(int(obj)))
    elif isinstance(obj, (float, np.floating)):
        parts.append(format_float(float(obj)))
    elif isinstance(obj, str):
        parts.append('"' + obj.replace("\\", "\\\\").replace('"', '\\"') + '"')
    elif isinstance(obj, dict):
        parts.append("{")
        for n, key in enumerate(sorted(obj)):
            if not isinstance(key, str):
                raise TypeError(f"report keys must be strings, got {key!r}")
            if n:
                parts.append(", ")
            _encode(key, parts)
            parts.append(": ")
            _encode(obj[key], parts)
        parts.append("}")
    elif isinstance(obj, (list, tuple, np.ndarray)):
        parts.append("[")
        for n, item in enumerate(list(obj)):
            if n:
                parts.append(", ")
            _encode(item, parts)
        parts.append("]")
    else:
        raise TypeError(f"cannot serialize {type(obj)} into a report")


def canonical_json(obj) -> str:
    parts: list[str] = []
    _encode(obj, parts)
    parts.append("\n")
    return "".join(parts)


def canonical_csv(rows: list[dict], fieldnames: list[str]) -> str:
    def cell(value) -> str:
        if isinstance(value, (float, np.floating)):
            return format_float(float(value))
        if isinstance(value, (bool, np.bool_)):
            return "true" if value else "false"
        return str(value)

    lines = [",".join(fieldnames)]
    for row in rows:
        lines.append(",".join(cell(row.get(name, "")) for name in fieldnames))
    return "\n".join(lines) + "\n"


def write_text(path: str, text: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        handle.write(text)
