"""Report container and its text / canonical-JSON renderings.

JSON output is canonical: keys sorted, two-space indent, floats written
with 17 significant digits so that parsing and re-serializing reproduces
the same bytes.
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass, field

TOP_LEVEL_KEYS = ("input", "normalized", "fit", "critical", "verdict", "warnings")


@dataclass
class Report:
    input: dict
    normalized: dict | None = None
    fit: dict | None = None
    critical: dict | None = None
    verdict: str | None = None
    warnings: list = field(default_factory=list)
    exit_code: int = 0

    def to_dict(self) -> dict:
        return {key: getattr(self, key) for key in TOP_LEVEL_KEYS}


def format_float(x: float) -> str:
    if not math.isfinite(x):
        raise ValueError(f"report values must be finite, got {x}")
    return format(x, ".17g")


def _encode(obj, indent, level):
    pad = " " * (indent * (level + 1))
    close = " " * (indent * level)
    if obj is None:
        return "null"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if isinstance(obj, enum.Enum):
        return _encode(obj.value, indent, level)
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        return format_float(obj)
    if isinstance(obj, str):
        return json.dumps(obj, ensure_ascii=False)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k), ensure_ascii=False)}: {_encode(obj[k], indent, level + 1)}"
                 for k in sorted(obj, key=str)]
        return "{\n" + ",\n".join(items) + "\n" + close + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        items = [pad + _encode(v, indent, level + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + close + "]"
    if hasattr(obj, "item"):  # numpy scalar
        return _encode(obj.item(), indent, level)
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj, indent=2) -> str:
    return _encode(obj, indent, 0) + "\n"


def _flatten(prefix, obj, out):
    if isinstance(obj, dict):
        for key in sorted(obj):
            _flatten(f"{prefix}.{key}" if prefix else str(key), obj[key], out)
    elif isinstance(obj, list) and obj and all(isinstance(r, dict) for r in obj):
        out.append((prefix, obj))
    elif isinstance(obj, list):
        for i, v in enumerate(obj):
            _flatten(f"{prefix}[{i}]", v, out)
    else:
        out.append((prefix, obj))


def _scalar(v):
    if v is None:
        return "-"
    if isinstance(v, enum.Enum):
        return str(v.value)
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return format_float(v)
    return str(v)


def render_text(report: Report) -> str:
    """``key: value`` lines; lists of rows become comma-delimited tables."""
    d = report.to_dict()
    lines = []
    for section in TOP_LEVEL_KEYS:
        value = d[section]
        if section == "warnings":
            lines.append(f"warnings: {len(value)}")
            lines.extend(f"  {w}" for w in value)
            continue
        if not isinstance(value, dict):
            lines.append(f"{section}: {_scalar(value)}")
            continue
        lines.append(f"[{section}]")
        flat = []
        _flatten("", value, flat)
        for key, v in flat:
            if isinstance(v, list):
                cols = list(v[0])
                lines.append(f"{key}:")
                lines.append(",".join(cols))
                lines.extend(",".join(_scalar(row[c]) for c in cols) for row in v)
            else:
                lines.append(f"{key}: {_scalar(v)}")
    return "\n".join(lines) + "\n"
