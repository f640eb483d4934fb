"""Canonical, deterministic serialization of report payloads.

Big integers serialize as decimal strings, rationals as "p/q", log-scale
magnitudes as {sign, log2mag} with six decimals.  JSON output is fully
ordered so identical inputs produce byte-identical documents.
"""

from __future__ import annotations

import json
import sys
from dataclasses import asdict, is_dataclass
from fractions import Fraction
from typing import Any

from .exactcore import Enclosure, LogMag

# Convergent numerators/denominators easily exceed CPython's default
# int-to-decimal conversion limit; the reports need the full digits.
if hasattr(sys, "set_int_max_str_digits"):
    sys.set_int_max_str_digits(0)

#: Integers at or above this magnitude serialize as decimal strings.
_BIG_INT = 10**15


def fraction_str(value: Fraction) -> str:
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return "%d/%d" % (value.numerator, value.denominator)


def json_safe(obj: Any) -> Any:
    """Recursively convert report values into JSON-stable primitives."""
    if obj is None or isinstance(obj, (bool, str)):
        return obj
    if isinstance(obj, LogMag):
        return obj.serialize()
    if isinstance(obj, Enclosure):
        return {"lower": fraction_str(obj.lower), "upper": fraction_str(obj.upper)}
    if isinstance(obj, Fraction):
        return fraction_str(obj)
    if isinstance(obj, int):
        return str(obj) if abs(obj) >= _BIG_INT else obj
    if isinstance(obj, float):
        return f"{obj:.6f}"
    if isinstance(obj, dict):
        return {str(k): json_safe(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [json_safe(v) for v in obj]
    if is_dataclass(obj):
        return json_safe(asdict(obj))
    raise TypeError("cannot serialize %r" % type(obj))


def to_canonical_json(payload: Any) -> str:
    return json.dumps(json_safe(payload), sort_keys=True, indent=2) + "\n"
