"""Tagged scalar values held by cells.

The native Python types double as the variants: float is Number, str is
Text, bool is Boolean, None is Empty, and ErrorValue wraps an ErrorKind.
Dates, times, durations and percents are Numbers; display formats decide
how they read. bool must be tested before float since round-tripping
through arithmetic normalizes everything numeric to float.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Union


class ErrorKind(enum.Enum):
    DIV0 = "DIV0"
    REF = "REF"
    NAME = "NAME"
    VALUE = "VALUE"
    CYCLE = "CYCLE"


@dataclass(frozen=True)
class ErrorValue:
    kind: ErrorKind


Value = Union[float, str, bool, ErrorValue, None]

ERROR_TEXT = {
    ErrorKind.DIV0: "#DIV/0!",
    ErrorKind.REF: "#REF!",
    ErrorKind.NAME: "#NAME?",
    ErrorKind.VALUE: "#VALUE!",
    ErrorKind.CYCLE: "#CYCLE!",
}

TEXT_TO_ERROR = {text: kind for kind, text in ERROR_TEXT.items()}

DIV0 = ErrorValue(ErrorKind.DIV0)
REF_ERROR = ErrorValue(ErrorKind.REF)
NAME_ERROR = ErrorValue(ErrorKind.NAME)
VALUE_ERROR = ErrorValue(ErrorKind.VALUE)
CYCLE_ERROR = ErrorValue(ErrorKind.CYCLE)


def is_number(v: Value) -> bool:
    return isinstance(v, float) and not isinstance(v, bool)


def is_error(v: Value) -> bool:
    return isinstance(v, ErrorValue)


def value_kind(v: Value) -> str:
    """Variant name: Number | Text | Boolean | Error | Empty."""
    if v is None:
        return "Empty"
    if isinstance(v, bool):
        return "Boolean"
    if isinstance(v, float):
        return "Number"
    if isinstance(v, str):
        return "Text"
    if isinstance(v, ErrorValue):
        return "Error"
    raise TypeError(f"not a cell value: {v!r}")


def values_equal(a: Value, b: Value) -> bool:
    """Same variant and equal payload (1.0 and TRUE are not equal here)."""
    return value_kind(a) == value_kind(b) and a == b
