"""The (re)copy principle and series fill.

Copying a formula shifts its relative references by the copy offset and
leaves '$'-anchored components and names alone; a reference pushed off the
grid turns into a #REF! marker inside the tree. Copying a value copies it
verbatim. That one rule is why a single formula fills the Step-6 block.

Fill extends seed cells along one axis. The rule is chosen per lane (each
column when filling down, each row when filling right) from at most the
first two seed cells, so the choice stays explainable in one line:

    one number                -> constant copy
    one date-formatted cell   -> +1 day
    one time-formatted cell   -> +1 hour
    text with a trailing int  -> increment the integer
    any other single cell     -> constant copy
    two numbers               -> arithmetic series, step v1 - v0
    formula seeds             -> copy semantics, offsets growing per step
    anything else             -> constant copy of the seed pattern, cyclic

Generated literal cells get a replayable entry (the text you could have
typed), so a saved and reloaded book shows the same grid.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from typing import Optional

from .addresses import MAX_COLS, MAX_ROWS, CellAddr, CellRange, col_letters
from .coercion import coerce
from .formats import (
    GENERAL,
    DisplayFormat,
    FormatKind,
    render,
    render_date,
    render_duration,
    render_time,
)
from .formula import ErrorLit, FormulaAst, RangeExpr, RefExpr, precedents, print_formula
from .locales import LocaleProfile
from .values import ErrorKind, Value, is_number, values_equal

_REF_MARKER = ErrorLit(ErrorKind.REF)


class FillError(ValueError):
    pass


# -- reference rewriting ------------------------------------------------------

def rewrite(ast: FormulaAst, d_row: int, d_col: int) -> FormulaAst:
    """Shift relative reference components; anchored parts stay fixed.

    A reference (or either end of a range) leaving the grid becomes a
    #REF! literal — an error value in the tree, never an exception.
    """
    if isinstance(ast, RefExpr):
        row = ast.row if ast.row_abs else ast.row + d_row
        col = ast.col if ast.col_abs else ast.col + d_col
        if not (0 <= row < MAX_ROWS and 0 <= col < MAX_COLS):
            return _REF_MARKER
        if row == ast.row and col == ast.col:
            return ast
        return dataclasses.replace(ast, row=row, col=col)
    if isinstance(ast, RangeExpr):
        start = rewrite(ast.start, d_row, d_col)
        end = rewrite(ast.end, d_row, d_col)
        if isinstance(start, ErrorLit) or isinstance(end, ErrorLit):
            return _REF_MARKER
        return RangeExpr(start, end)
    if hasattr(ast, "args"):  # FuncCall
        return dataclasses.replace(
            ast, args=tuple(rewrite(a, d_row, d_col) for a in ast.args))
    if hasattr(ast, "expr"):  # Unary
        return dataclasses.replace(ast, expr=rewrite(ast.expr, d_row, d_col))
    if hasattr(ast, "lhs"):  # Binary
        return dataclasses.replace(ast,
                                   lhs=rewrite(ast.lhs, d_row, d_col),
                                   rhs=rewrite(ast.rhs, d_row, d_col))
    return ast  # literals and names are offset-immune


# -- cell transplanting -------------------------------------------------------

def _snapshot(wb, addr: CellAddr):
    cell = wb.cell(addr)
    if cell is None:
        return None
    return (cell.entry, cell.ast, cell.value, cell.format, cell.style)


def _plant(wb, addr: CellAddr, snap, d_row: int, d_col: int) -> None:
    """Write one copied cell (or clear the target for an empty source)."""
    if snap is None:
        wb.clear_cell(addr)
        return
    entry, ast, value, fmt, style = snap
    cell = wb.ensure_cell(addr)
    if ast is not None:
        moved = rewrite(ast, d_row, d_col)
        cell.ast = moved
        cell.entry = print_formula(moved)
        cell.value = value  # stale until recalc
        wb.graph.set_precedents(
            addr, precedents(moved, addr, wb.resolve_sheet, wb.names))
    else:
        cell.ast = None
        cell.entry = entry
        cell.value = value
        wb.graph.set_precedents(addr, set())
    cell.format = fmt
    cell.style = style


def _finish_batch(wb, targets: list, olds: dict, states: dict) -> set:
    changed = wb.recalc(set(targets))
    state_changed = False
    for addr in targets:
        if not values_equal(olds[addr], wb.value_at(addr)):
            changed.add(addr)
        if states[addr] != wb.cell_state(addr):
            state_changed = True
    if changed or state_changed:
        wb.revision += 1
    return changed


# -- copy ----------------------------------------------------------------------

def copy_block(wb, src: CellRange, dst: CellRange) -> set:
    """Copy a block, tiling when the destination is an exact multiple.

    A destination that is not a multiple of the source (a bare anchor,
    usually) receives a single copy at its top-left corner. Sources are
    snapshotted before any write, so overlapping copies are safe.
    """
    if (dst.rows % src.rows == 0) and (dst.cols % src.cols == 0):
        tiles_down = dst.rows // src.rows
        tiles_right = dst.cols // src.cols
    else:
        tiles_down = tiles_right = 1
    end = CellAddr(dst.start.sheet,
                   dst.start.row + tiles_down * src.rows - 1,
                   dst.start.col + tiles_right * src.cols - 1)
    if not end.in_bounds():
        raise ValueError("copy destination exceeds the grid")

    snaps = {addr: _snapshot(wb, addr) for addr in src}
    targets = []
    olds = {}
    states = {}
    writes = []
    for tr in range(tiles_down):
        for tc in range(tiles_right):
            for src_addr in src:
                d_row = dst.start.row + tr * src.rows - src.start.row
                d_col = dst.start.col + tc * src.cols - src.start.col
                t_addr = CellAddr(dst.start.sheet,
                                  src_addr.row + d_row, src_addr.col + d_col)
                targets.append(t_addr)
                olds[t_addr] = wb.value_at(t_addr)
                states[t_addr] = wb.cell_state(t_addr)
                writes.append((t_addr, snaps[src_addr], d_row, d_col))
    for t_addr, snap, d_row, d_col in writes:
        _plant(wb, t_addr, snap, d_row, d_col)
    return _finish_batch(wb, targets, olds, states)


# -- fill ------------------------------------------------------------------------

@dataclass(frozen=True)
class FillRule:
    kind: str  # ConstantCopy NumericDelta DateStep TimeStep TrailingIntInc FormulaCopy
    step: Optional[float] = None


@dataclass
class FillResult:
    changed: set
    rules: list  # (lane-label, FillRule) per lane


def _series_kind(fmt: DisplayFormat) -> str:
    if fmt.kind is FormatKind.DATE:
        return "DateStep"
    if fmt.kind in (FormatKind.TIME, FormatKind.DURATION):
        return "TimeStep"
    return "NumericDelta"


def _trailing_int(text: str):
    i = len(text)
    while i > 0 and text[i - 1].isdigit():
        i -= 1
    if i == len(text):
        return None
    return text[:i], text[i:]


def locale_number_text(v: float, locale: LocaleProfile) -> str:
    text = str(int(v)) if v == int(v) and abs(v) < 1e16 else repr(v)
    return text.replace(".", locale.decimal_sep)


def entry_for_value(v: float, fmt: DisplayFormat, locale: LocaleProfile,
                    today) -> str:
    """Replayable entry text for a generated numeric value.

    Prefer the friendly spelling (a date, a time, a percent); if its
    re-coercion would not display identically under the cell's format,
    fall back to the exact decimal form.
    """
    kind = fmt.kind
    if kind is FormatKind.DATE:
        synth = render_date(v, "DD/MM/YYYY", locale)
    elif kind is FormatKind.TIME:
        synth = render_time(v)
    elif kind is FormatKind.DURATION:
        synth = render_duration(v)
    elif kind is FormatKind.PERCENT:
        synth = locale_number_text(v * 100.0, locale) + "%"
    else:
        synth = locale_number_text(v, locale)
    replayed = coerce(synth, locale, today)
    if is_number(replayed.value) and (
            render(replayed.value, fmt, locale) == render(v, fmt, locale)):
        return synth
    return locale_number_text(v, locale)


def fill(wb, seed: CellRange, target: CellRange) -> FillResult:
    """Extend seed cells along one axis, one rule per lane."""
    if target.start != seed.start:
        raise FillError("target must share the seed's top-left corner")
    down = target.cols == seed.cols and target.rows > seed.rows
    right = target.rows == seed.rows and target.cols > seed.cols
    if target.rows == seed.rows and target.cols == seed.cols:
        return FillResult(changed=set(), rules=[])
    if not (down or right):
        raise FillError("target must extend the seed along exactly one axis")
    if not target.end.in_bounds():
        raise FillError("fill target exceeds the grid")

    k = seed.rows if down else seed.cols
    length = target.rows if down else target.cols
    lanes = range(seed.start.col, seed.end.col + 1) if down \
        else range(seed.start.row, seed.end.row + 1)

    def lane_addr(lane: int, pos: int) -> CellAddr:
        if down:
            return CellAddr(seed.start.sheet, seed.start.row + pos, lane)
        return CellAddr(seed.start.sheet, lane, seed.start.col + pos)

    targets = []
    olds = {}
    states = {}
    writes = []  # (addr, plant-args or literal payload)
    rules = []

    for lane in lanes:
        seeds = [lane_addr(lane, p) for p in range(k)]
        snaps = [_snapshot(wb, a) for a in seeds]
        label = (col_letters(lane) if down else str(lane + 1))
        rule, payloads = _plan_lane(wb, seeds, snaps, k, length, down)
        rules.append((label, rule))
        for pos in range(k, length):
            addr = lane_addr(lane, pos)
            targets.append(addr)
            olds[addr] = wb.value_at(addr)
            states[addr] = wb.cell_state(addr)
            writes.append((addr, payloads[pos - k]))

    for addr, payload in writes:
        mode = payload[0]
        if mode == "plant":
            _, snap, d_row, d_col = payload
            _plant(wb, addr, snap, d_row, d_col)
        else:
            _, entry, fmt, style = payload
            wb.apply_entry(addr, entry)
            cell = wb.cell(addr)
            if cell is not None:
                cell.format = fmt
                cell.style = style

    changed = _finish_batch(wb, targets, olds, states)
    return FillResult(changed=changed, rules=rules)


def _plan_lane(wb, seeds: list, snaps: list, k: int, length: int, down: bool):
    """Choose the lane's rule and precompute per-position write payloads."""
    asts = [s[1] if s else None for s in snaps]
    values = [s[2] if s else None for s in snaps]
    formats = [s[3] if s else GENERAL for s in snaps]
    styles = [s[4] if s else None for s in snaps]

    def planted(rule: FillRule):
        out = []
        for pos in range(k, length):
            src_idx = pos % k
            units = pos - src_idx
            d_row, d_col = (units, 0) if down else (0, units)
            out.append(("plant", snaps[src_idx], d_row, d_col))
        return rule, out

    def series(v0: float, step: float, rule: FillRule):
        out = []
        for pos in range(k, length):
            v = v0 + pos * step
            entry = entry_for_value(v, formats[0], wb.locale, wb.today)
            out.append(("literal", entry, formats[0], styles[0]))
        return rule, out

    if any(a is not None for a in asts):
        return planted(FillRule("FormulaCopy"))

    if k >= 2:
        head = values[:2]
        if all(is_number(v) for v in head):
            v0, v1 = head
            return series(v0, v1 - v0,
                          FillRule(_series_kind(formats[0]), step=v1 - v0))
        if len({_value_class(v) for v in head}) > 1:
            wb.diagnostics.append(
                "fill: mixed seed types, copying the seed pattern")
        return planted(FillRule("ConstantCopy"))

    v0 = values[0]
    fmt = formats[0]
    if is_number(v0) and fmt.kind is FormatKind.DATE:
        return series(v0, 1.0, FillRule("DateStep", step=1.0))
    if is_number(v0) and fmt.kind in (FormatKind.TIME, FormatKind.DURATION):
        return series(v0, 1.0 / 24.0, FillRule("TimeStep", step=1.0 / 24.0))
    if isinstance(v0, str) and _trailing_int(v0) is not None:
        prefix, digits = _trailing_int(v0)
        base = int(digits)
        width = len(digits) if digits.startswith("0") else 0
        out = []
        for pos in range(k, length):
            text = prefix + str(base + pos).zfill(width)
            if text[:1] in ("=", "'") or _coerces_away(text, wb):
                text = "'" + text
            out.append(("literal", text, fmt, styles[0]))
        return FillRule("TrailingIntInc", step=1.0), out
    return planted(FillRule("ConstantCopy"))


def _value_class(v: Value) -> str:
    if is_number(v):
        return "number"
    if isinstance(v, str):
        return "text"
    return "other"


def _coerces_away(text: str, wb) -> bool:
    """Would this generated text coerce into something other than itself?"""
    result = coerce(text, wb.locale, wb.today)
    return result.value != text
