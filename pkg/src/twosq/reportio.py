"""Deterministic report serialization.

JSON is emitted by a small recursive writer rather than json.dumps so that
float formatting is fixed at 10 significant digits and rationals print as
"num/den"; identical report objects therefore serialize to identical bytes
regardless of how they were computed.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Any, Iterable


def format_float(v: float) -> str:
    if math.isnan(v):
        return "NaN"
    if math.isinf(v):
        return "Infinity" if v > 0 else "-Infinity"
    return f"{v:.10g}"


def format_fraction(v: Fraction) -> str:
    return f"{v.numerator}/{v.denominator}" if v.denominator != 1 else str(v.numerator)


def _emit(obj: Any, out: list[str]) -> None:
    if obj is None:
        out.append("null")
    elif obj is True:
        out.append("true")
    elif obj is False:
        out.append("false")
    elif isinstance(obj, Fraction):
        out.append('"' + format_fraction(obj) + '"')
    elif isinstance(obj, int):
        out.append(str(obj))
    elif isinstance(obj, float):
        out.append(format_float(obj))
    elif isinstance(obj, str):
        out.append('"' + obj.replace("\\", "\\\\").replace('"', '\\"') + '"')
    elif isinstance(obj, dict):
        out.append("{")
        for i, (k, v) in enumerate(obj.items()):
            if i:
                out.append(", ")
            out.append('"' + str(k).replace("\\", "\\\\").replace('"', '\\"') + '": ')
            _emit(v, out)
        out.append("}")
    elif isinstance(obj, (list, tuple)):
        out.append("[")
        for i, v in enumerate(obj):
            if i:
                out.append(", ")
            _emit(v, out)
        out.append("]")
    else:
        # numpy scalars and other number-likes
        if hasattr(obj, "item"):
            _emit(obj.item(), out)
        else:
            raise TypeError(f"cannot serialize {type(obj)!r}")


def to_json(obj: Any) -> str:
    out: list[str] = []
    _emit(obj, out)
    out.append("\n")
    return "".join(out)


def to_csv(rows: Iterable[Iterable[Any]], header: Iterable[str] | None = None) -> str:
    def cell(v: Any) -> str:
        if isinstance(v, float):
            return format_float(v)
        if isinstance(v, Fraction):
            return format_fraction(v)
        return str(v)

    lines = []
    if header is not None:
        lines.append(",".join(header))
    for row in rows:
        lines.append(",".join(cell(v) for v in row))
    return "\n".join(lines) + "\n"
