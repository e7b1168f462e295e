"""Large-data helpers: filters, row/column hiding, delimited import/export.

Filtering and hiding are display-only: they never touch stored or computed
values, and a SUM over hidden rows still sees them. That asymmetry is the
whole lesson — the data outlives what the screen shows.

Delimited text follows RFC-4180 quoting generalized to any delimiter and
quote pair: quoted fields may contain delimiters and newlines, quotes
escape by doubling, records split on LF or CRLF and export emits LF.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Union

from .addresses import MAX_COLS, MAX_ROWS, CellAddr, CellRange, parse_range, render_range
from .evaluate import compare
from .formats import machine_text
from .values import Value, is_error, is_number, values_equal

PREDICATE_OPS = ("equals", "contains", "lt", "le", "gt", "ge", "nonempty")


@dataclass(frozen=True)
class ColumnPredicate:
    col: int
    op: str
    operand: Value = None

    def __post_init__(self) -> None:
        if self.op not in PREDICATE_OPS:
            raise ValueError(f"unknown predicate op {self.op!r}")
        if self.op in ("lt", "le", "gt", "ge") and not is_number(self.operand):
            raise ValueError(f"predicate {self.op!r} needs a Number operand")


@dataclass(frozen=True)
class BoolClause:
    op: str  # "and" | "or"
    clauses: tuple

    def __post_init__(self) -> None:
        if self.op not in ("and", "or"):
            raise ValueError(f"unknown clause op {self.op!r}")
        if not self.clauses:
            raise ValueError("empty clause list")


ClauseNode = Union[ColumnPredicate, BoolClause]


@dataclass(frozen=True)
class FilterSpec:
    region: CellRange
    root: ClauseNode


def _predicate_matches(pred: ColumnPredicate, value: Value) -> bool:
    # a type mismatch makes the clause false for that row, never an error
    if pred.op == "nonempty":
        return value is not None
    if is_error(value):
        return False
    if pred.op == "equals":
        if value is None:
            return False
        return compare(value, pred.operand) == 0
    if pred.op == "contains":
        if value is None:
            return False
        needle = machine_text(pred.operand).casefold()
        return needle in machine_text(value).casefold()
    # numeric comparisons
    if not is_number(value):
        return False
    c = compare(value, pred.operand)
    return {"lt": c < 0, "le": c <= 0, "gt": c > 0, "ge": c >= 0}[pred.op]


def row_matches(sheet, sheet_index: int, row: int, node: ClauseNode) -> bool:
    if isinstance(node, ColumnPredicate):
        cell = sheet.cells.get(CellAddr(sheet_index, row, node.col))
        return _predicate_matches(node, cell.value if cell else None)
    results = (row_matches(sheet, sheet_index, row, c) for c in node.clauses)
    return all(results) if node.op == "and" else any(results)


def apply_filter(sheet, spec: ClauseNode, region: CellRange) -> set:
    """Row indices within the region whose cells satisfy the clause tree.

    Pure: reads computed values only, mutates nothing.
    """
    sheet_index = region.start.sheet
    return {row for row in range(region.start.row, region.end.row + 1)
            if row_matches(sheet, sheet_index, row, spec)}


def filter_hidden_rows(sheet, sheet_index: int) -> set:
    """Rows the active filter hides (empty when no filter is set)."""
    if sheet.filter is None:
        return set()
    region = sheet.filter.region
    visible = apply_filter(sheet, sheet.filter.root, region)
    return {row for row in range(region.start.row, region.end.row + 1)
            if row not in visible}


def set_hidden(sheet, axis: str, indices: set, hidden: bool) -> bool:
    """Update a sheet's hidden-row/column sets. Returns True if changed."""
    if axis not in ("rows", "cols"):
        raise ValueError(f"axis must be 'rows' or 'cols', not {axis!r}")
    target = sheet.hidden_rows if axis == "rows" else sheet.hidden_cols
    before = set(target)
    if hidden:
        target.update(indices)
    else:
        target.difference_update(indices)
    return target != before


# -- filter (de)serialization -------------------------------------------------

def _node_to_json(node: ClauseNode) -> dict:
    if isinstance(node, ColumnPredicate):
        out: dict = {"col": node.col, "op": node.op}
        if node.op != "nonempty":
            out["operand"] = node.operand
        return out
    return {"op": node.op, "clauses": [_node_to_json(c) for c in node.clauses]}


def _node_from_json(data: dict) -> ClauseNode:
    if "clauses" in data:
        return BoolClause(op=data["op"],
                          clauses=tuple(_node_from_json(c) for c in data["clauses"]))
    operand = data.get("operand")
    if isinstance(operand, int) and not isinstance(operand, bool):
        operand = float(operand)
    return ColumnPredicate(col=data["col"], op=data["op"], operand=operand)


def filter_to_json(spec: Optional[FilterSpec]):
    if spec is None:
        return None
    return {"region": render_range(spec.region), "clauses": _node_to_json(spec.root)}


def filter_from_json(data, sheet: int = 0) -> Optional[FilterSpec]:
    if data is None:
        return None
    return FilterSpec(region=parse_range(data["region"], sheet=sheet),
                      root=_node_from_json(data["clauses"]))


# -- delimited text ------------------------------------------------------------

class UnbalancedQuote(ValueError):
    def __init__(self, line: int):
        super().__init__(f"unbalanced quote on line {line}")
        self.line = line


class ImportOutOfBounds(ValueError):
    pass


@dataclass(frozen=True)
class ImportSpec:
    delimiter: str = ";"
    quote: str = '"'
    header_row: bool = False
    anchor: CellAddr = field(default=CellAddr(0, 0, 0))
    allow_formulas: bool = False

    def __post_init__(self) -> None:
        if self.delimiter == self.quote:
            raise ValueError("delimiter and quote must differ")
        if len(self.delimiter) != 1 or len(self.quote) != 1:
            raise ValueError("delimiter and quote are single characters")


def parse_delimited(text: str, delimiter: str, quote: str) -> list:
    """Split text into records of fields. Raises UnbalancedQuote."""
    if not text:
        return []
    records: list = []
    fields: list = []
    i, n = 0, len(text)
    line = 1
    while i <= n:
        # one field, starting at i
        buf: list = []
        if i < n and text[i] == quote:
            start_line = line
            i += 1
            closed = False
            while i < n:
                ch = text[i]
                if ch == quote:
                    if i + 1 < n and text[i + 1] == quote:
                        buf.append(quote)
                        i += 2
                        continue
                    i += 1
                    closed = True
                    break
                if ch == "\n":
                    line += 1
                buf.append(ch)
                i += 1
            if not closed:
                raise UnbalancedQuote(start_line)
            if i < n and text[i] != delimiter and text[i] not in ("\n", "\r"):
                raise UnbalancedQuote(start_line)
        else:
            while i < n:
                ch = text[i]
                if ch == delimiter or ch == "\n" or (
                        ch == "\r" and i + 1 < n and text[i + 1] == "\n"):
                    break
                if ch == quote:
                    raise UnbalancedQuote(line)
                buf.append(ch)
                i += 1
        fields.append("".join(buf))
        # the field ends at a delimiter, a record end, or EOF
        if i < n and text[i] == delimiter:
            i += 1
            continue
        records.append(fields)
        fields = []
        if i >= n:
            break
        if text[i] == "\r":
            i += 2
        else:
            i += 1
        line += 1
        if i >= n:
            break  # trailing newline ends the last record cleanly
    return records


def render_delimited(rows: list, delimiter: str, quote: str) -> str:
    out = []
    for fields in rows:
        rendered = []
        for fieldtext in fields:
            if (delimiter in fieldtext or quote in fieldtext
                    or "\n" in fieldtext or "\r" in fieldtext):
                fieldtext = quote + fieldtext.replace(quote, quote + quote) + quote
            rendered.append(fieldtext)
        out.append(delimiter.join(rendered))
    return "\n".join(out) + ("\n" if out else "")


def import_delimited(wb, text: str, spec: ImportSpec) -> set:
    """Write delimited text into the grid, one coerced cell per field.

    Untrusted by default: fields that look like formulas (or that start
    with the escape apostrophe) import as literal text unless
    allow_formulas is set. Empty fields leave their cells untouched.
    """
    records = parse_delimited(text, spec.delimiter, spec.quote)
    if not records:
        return set()
    height = len(records)
    width = max(len(r) for r in records)
    anchor = spec.anchor
    if anchor.row + height > MAX_ROWS or anchor.col + width > MAX_COLS:
        raise ImportOutOfBounds(
            f"{height}x{width} block at {anchor.row},{anchor.col} exceeds the grid")

    writes = []
    for r, fields in enumerate(records):
        force_text = spec.header_row and r == 0
        for c, fieldtext in enumerate(fields):
            if fieldtext == "":
                continue
            addr = CellAddr(anchor.sheet, anchor.row + r, anchor.col + c)
            if force_text or (not spec.allow_formulas
                              and fieldtext[0] in ("=", "'")):
                fieldtext = "'" + fieldtext
            writes.append((addr, fieldtext))

    olds = {addr: wb.value_at(addr) for addr, _ in writes}
    states = {addr: wb.cell_state(addr) for addr, _ in writes}
    for addr, fieldtext in writes:
        wb.apply_entry(addr, fieldtext)
    changed = wb.recalc({addr for addr, _ in writes})
    state_changed = False
    for addr, _ in writes:
        if not values_equal(olds[addr], wb.value_at(addr)):
            changed.add(addr)
        if states[addr] != wb.cell_state(addr):
            state_changed = True
    if changed or state_changed:
        wb.revision += 1
    return changed


def export_delimited(wb, region: CellRange, delimiter: str = ";",
                     quote: str = '"') -> str:
    """The inverse of import: emits entries so a re-import round-trips.

    Cells that never had an entry (formatted-but-empty, for instance)
    fall back to their display string. One leading escape apostrophe is
    stripped; import adds it back when needed.
    """
    rows = []
    for r in range(region.start.row, region.end.row + 1):
        fields = []
        for c in range(region.start.col, region.end.col + 1):
            addr = CellAddr(region.start.sheet, r, c)
            cell = wb.cell(addr)
            if cell is None:
                fields.append("")
            elif cell.entry is not None:
                entry = cell.entry
                fields.append(entry[1:] if entry.startswith("'") else entry)
            else:
                fields.append(wb.get_display(addr))
        rows.append(fields)
    return render_delimited(rows, delimiter, quote)
