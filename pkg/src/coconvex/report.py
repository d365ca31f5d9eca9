"""Deterministic JSON report documents.

Field order follows insertion / dataclass order.  Floats are written either
in shortest round-trip form (``repr``) or with 17 significant digits, which
is what the golden files use.  NaN becomes ``null`` and infinities become the
strings ``"inf"`` / ``"-inf"``.
"""

from __future__ import annotations

import dataclasses
import json
import math
from enum import Enum

import numpy as np

from .polynomial import Interval, Polynomial

FLOAT_FORMATS = ("shortest", "fixed17")


def to_plain(obj):
    """Turn reports, dataclasses and numpy scalars into JSON-ready values."""
    if isinstance(obj, Enum):
        return obj.value
    if isinstance(obj, Interval):
        return [obj.lo, obj.hi]
    if isinstance(obj, Polynomial):
        return {"coeffs": list(obj.coeffs), "text": str(obj)}
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        out = {f.name: to_plain(getattr(obj, f.name)) for f in dataclasses.fields(obj)}
        for name in ("margin", "bound_holds"):
            if hasattr(type(obj), name) and isinstance(getattr(type(obj), name), property):
                out[name] = to_plain(getattr(obj, name))
        return out
    if isinstance(obj, dict):
        return {str(k): to_plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [to_plain(v) for v in obj.tolist()]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return float(obj)
    return obj


def format_float(v: float, style: str = "shortest") -> str:
    if math.isnan(v):
        return "null"
    if math.isinf(v):
        return '"inf"' if v > 0 else '"-inf"'
    v = v + 0.0
    if style == "fixed17":
        s = format(v, ".17g")
        return s if any(ch in s for ch in ".en") else s + ".0"
    return repr(v)


def dumps(obj, float_format: str = "shortest", indent: int = 2) -> str:
    if float_format not in FLOAT_FORMATS:
        raise ValueError(f"unknown float format {float_format!r}")
    return _dump(to_plain(obj), float_format, indent, 0)


def _dump(v, style, indent, level) -> str:
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if v is None:
        return "null"
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, int):
        return str(v)
    if isinstance(v, float):
        return format_float(v, style)
    if isinstance(v, str):
        return json.dumps(v, ensure_ascii=False)
    if isinstance(v, list):
        if not v:
            return "[]"
        if all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in v):
            return "[" + ", ".join(_dump(x, style, indent, level) for x in v) + "]"
        items = ",\n".join(pad + _dump(x, style, indent, level + 1) for x in v)
        return "[\n" + items + "\n" + end + "]"
    if isinstance(v, dict):
        if not v:
            return "{}"
        items = ",\n".join(
            f"{pad}{json.dumps(k)}: {_dump(x, style, indent, level + 1)}" for k, x in v.items())
        return "{\n" + items + "\n" + end + "}"
    raise TypeError(f"cannot serialise {type(v).__name__}")
