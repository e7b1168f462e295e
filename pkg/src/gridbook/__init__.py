"""gridbook: a small spreadsheet kernel built to teach how spreadsheets think.

The engine implements the invariants every mainstream spreadsheet shares —
entry coercion, display formatting, A1 references with anchoring, a
dependency-graph recalculator, copy with reference rewriting, series fill,
conditional formatting, filtering, delimited import, and chart scaling —
each small enough to read, with an `explain` trace for the parts that
usually feel like magic.
"""

from .addresses import CellAddr, CellRange, parse_addr, parse_range
from .coercion import CoercionResult, coerce, explain
from .formats import DisplayFormat, FormatKind, StyleState
from .locales import PAPER_FR, LocaleProfile
from .session import Session
from .values import ErrorKind, ErrorValue, Value
from .workbook import Workbook

__version__ = "0.1.0"

__all__ = [
    "CellAddr", "CellRange", "parse_addr", "parse_range",
    "CoercionResult", "coerce", "explain",
    "DisplayFormat", "FormatKind", "StyleState",
    "LocaleProfile", "PAPER_FR",
    "Session", "Workbook",
    "ErrorKind", "ErrorValue", "Value",
    "__version__",
]
