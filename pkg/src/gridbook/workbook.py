"""The grid data model: workbooks, sheets, cells, and the edit loop.

A cell remembers three layers: the entry (what was typed, shown in the
formula bar), the content (a parsed formula or a coerced value), and the
computed value (the cache the grid displays through a format). Edits
never fail — a malformed formula degrades to Text plus a diagnostic, so
the learner always sees what the system did with their input.

Recalculation is incremental: an edit dirties its transitive dependents
only, and the result must be indistinguishable from recomputing the whole
book from scratch (the suite holds us to that).
"""

from __future__ import annotations

import datetime
import json
from dataclasses import dataclass, field
from typing import Iterator, Optional, Union

from .addresses import CellAddr, CellRange, parse_addr, parse_range, render_addr, render_range
from .coercion import coerce
from .evaluate import EvalContext, evaluate
from .formats import GENERAL, PLAIN, DisplayFormat, FormatKind, StyleState, render
from .formula import (
    FormulaAst,
    NumberLit,
    ParseError,
    iter_ref_addrs,
    parse,
    precedents,
)
from .graph import DependencyGraph
from .locales import DEFAULT_TODAY, PAPER_FR, LocaleProfile
from .values import CYCLE_ERROR, Value, value_kind, values_equal
from . import tableops

FILE_VERSION = 1


class PersistenceError(Exception):
    pass


class VersionMismatch(PersistenceError):
    pass


class SchemaError(PersistenceError):
    pass


@dataclass
class Cell:
    entry: Optional[str] = None
    ast: Optional[FormulaAst] = None
    value: Value = None
    format: DisplayFormat = GENERAL
    style: StyleState = PLAIN

    def is_blank(self) -> bool:
        return (self.entry is None and self.ast is None and self.value is None
                and self.format == GENERAL and self.style == PLAIN)


@dataclass
class Sheet:
    name: str
    cells: dict = field(default_factory=dict)  # CellAddr -> Cell
    hidden_rows: set = field(default_factory=set)
    hidden_cols: set = field(default_factory=set)
    filter: Optional["tableops.FilterSpec"] = None


class Workbook(EvalContext):
    def __init__(self, locale: LocaleProfile = PAPER_FR,
                 today: datetime.date = DEFAULT_TODAY):
        self.locale = locale
        self.today = today
        self.sheets: list = [Sheet(name="Sheet1")]
        self._names: dict = {}
        self.graph = DependencyGraph()
        self.revision = 0
        self.diagnostics: list = []
        self.eval_count = 0
        # cells currently showing #CYCLE! (on a cycle or downstream of one);
        # kept across recalcs so a new formula reading a tainted cell is
        # tainted too, even if evaluation would never reach that read
        self.tainted: set = set()

    # -- EvalContext

    def value_at(self, addr: CellAddr) -> Value:
        cell = self.cell(addr)
        return cell.value if cell else None

    def resolve_sheet(self, name: str) -> Optional[int]:
        lowered = name.lower()
        for i, sheet in enumerate(self.sheets):
            if sheet.name.lower() == lowered:
                return i
        return None

    @property
    def names(self) -> dict:
        return self._names

    # -- structure

    def add_sheet(self, name: str) -> int:
        if not name:
            raise ValueError("sheet name must be non-empty")
        if self.resolve_sheet(name) is not None:
            raise ValueError(f"duplicate sheet name {name!r}")
        self.sheets.append(Sheet(name=name))
        self.revision += 1
        return len(self.sheets) - 1

    def define_name(self, name: str, target: Union[CellAddr, CellRange]) -> None:
        key = name.upper()
        if not key or not key[0].isalpha() or not all(
                c.isalnum() or c == "_" for c in key):
            raise ValueError(f"bad name {name!r}")
        try:
            parse_addr(key)
        except Exception:
            pass
        else:
            raise ValueError(f"name {name!r} collides with an A1 address")
        self._names[key] = target
        self.revision += 1

    def cell(self, addr: CellAddr) -> Optional[Cell]:
        return self.sheets[addr.sheet].cells.get(addr)

    def ensure_cell(self, addr: CellAddr) -> Cell:
        cells = self.sheets[addr.sheet].cells
        if addr not in cells:
            cells[addr] = Cell()
        return cells[addr]

    def cell_state(self, addr: CellAddr) -> tuple:
        """Comparable snapshot of one cell, for has-anything-changed checks."""
        cell = self.cell(addr)
        if cell is None:
            return (None, None, "Empty", None, GENERAL, PLAIN)
        return (cell.entry, cell.ast, value_kind(cell.value), cell.value,
                cell.format, cell.style)

    # -- display

    def get_display(self, addr: CellAddr) -> str:
        cell = self.cell(addr)
        if cell is None:
            return ""
        return render(cell.value, cell.format, self.locale)

    def get_entry(self, addr: CellAddr) -> str:
        cell = self.cell(addr)
        return cell.entry if cell and cell.entry is not None else ""

    # -- edits

    def set_entry(self, addr: CellAddr, text: str) -> set:
        """Store an entry and recalculate. Returns the changed addresses."""
        before = self.cell_state(addr)
        old_value = self.value_at(addr)
        self.apply_entry(addr, text)
        changed = self.recalc({addr})
        if not values_equal(old_value, self.value_at(addr)):
            changed.add(addr)
        if changed or before != self.cell_state(addr):
            self.revision += 1
        return changed

    def apply_entry(self, addr: CellAddr, text: str) -> None:
        """The storage half of set_entry: no recalc, no revision bump.

        Batch operations (copy, fill, import, load) stage many of these
        and then recalculate once.
        """
        if text == "":
            self.clear_cell(addr)
            return
        cell = self.ensure_cell(addr)
        cell.entry = text
        cell.ast = None
        if text.startswith("'"):
            cell.value = text[1:]
            self.graph.set_precedents(addr, set())
        elif text.startswith("="):
            try:
                ast = parse(text)
            except ParseError as err:
                cell.value = text
                self.graph.set_precedents(addr, set())
                self.diagnostics.append(
                    f"{render_addr(addr)}: {err.message} at offset {err.offset}")
            else:
                cell.ast = ast
                self.graph.set_precedents(
                    addr, precedents(ast, addr, self.resolve_sheet, self._names))
                inferred = self._infer_formula_format(ast, addr)
                if inferred is not None:
                    cell.format = inferred
        else:
            result = coerce(text, self.locale, self.today)
            cell.value = result.value
            if result.format.kind is not FormatKind.GENERAL:
                cell.format = result.format
            self.graph.set_precedents(addr, set())

    def clear_cell(self, addr: CellAddr) -> None:
        cell = self.cell(addr)
        if cell is None:
            return
        cell.entry = None
        cell.ast = None
        cell.value = None
        self.graph.set_precedents(addr, set())
        if cell.is_blank():
            del self.sheets[addr.sheet].cells[addr]

    def set_format(self, rng: CellRange, fmt: DisplayFormat) -> set:
        """Apply a format to every cell of a range. Returns affected addrs."""
        affected = set()
        for addr in rng:
            cell = self.cell(addr)
            if cell is None:
                if fmt == GENERAL:
                    continue
                cell = self.ensure_cell(addr)
            if cell.format != fmt:
                cell.format = fmt
                affected.add(addr)
        if affected:
            self.revision += 1
        return affected

    def _infer_formula_format(self, ast: FormulaAst,
                              at: CellAddr) -> Optional[DisplayFormat]:
        """Entry-time format inference for formulas.

        A bare percent literal formats as Percent(0); otherwise the first
        referenced cell carrying a non-General format lends its format
        (reference order, judged at entry time). Anything else: no change.
        """
        if isinstance(ast, NumberLit) and ast.percent:
            return DisplayFormat(FormatKind.PERCENT, 0)
        for ref_addr in iter_ref_addrs(ast, at, self.resolve_sheet, self._names):
            cell = self.cell(ref_addr)
            if cell is not None and cell.format.kind is not FormatKind.GENERAL:
                return cell.format
        return None

    # -- recalculation

    def recalc(self, seeds: set) -> set:
        """Recompute the transitive dependents of `seeds`.

        Returns the addresses whose computed value changed. The edited
        seeds' own literal changes are the caller's to report (it knows
        the before value; we no longer do).
        """
        dirty = self.graph.dirty_from(seeds)
        plan = self.graph.plan(dirty)
        changed = set()
        for addr in plan.order:
            cell = self.cell(addr)
            old = cell.value if cell else None
            # taint is structural: planned taint covers cycles inside the
            # dirty set, self.tainted covers reads of cells poisoned earlier
            if addr in plan.tainted or any(
                    p in self.tainted
                    for p in self.graph.precedents_of(addr)):
                new = CYCLE_ERROR
                self.tainted.add(addr)
            else:
                self.tainted.discard(addr)
                if cell is not None and cell.ast is not None:
                    new = evaluate(cell.ast, self, addr)
                    self.eval_count += 1
                else:
                    new = old
            if cell is not None:
                cell.value = new
            if not values_equal(old, new):
                changed.add(addr)
        for addr in plan.cyclic:
            cell = self.ensure_cell(addr)
            self.tainted.add(addr)
            if not values_equal(cell.value, CYCLE_ERROR):
                changed.add(addr)
            cell.value = CYCLE_ERROR
        return changed

    def recalc_all(self) -> set:
        seeds = {addr for sheet in self.sheets for addr in sheet.cells}
        return self.recalc(seeds)

    # -- persistence

    def to_json(self) -> dict:
        sheets = []
        for sheet in self.sheets:
            cells = {}
            for addr, cell in sheet.cells.items():
                if cell.is_blank():
                    continue
                entry: dict = {}
                if cell.entry is not None:
                    entry["entry"] = cell.entry
                if cell.format != GENERAL:
                    entry["format"] = cell.format.to_json()
                if cell.style != PLAIN:
                    entry["style"] = cell.style.to_json()
                cells[render_addr(addr)] = entry
            sheets.append({
                "name": sheet.name,
                "cells": cells,
                "hiddenRows": sorted(sheet.hidden_rows),
                "hiddenCols": sorted(sheet.hidden_cols),
                "filter": tableops.filter_to_json(sheet.filter),
            })
        names = {}
        for key, target in self._names.items():
            if isinstance(target, CellAddr):
                names[key] = f"{self.sheets[target.sheet].name}!{render_addr(target)}"
            else:
                names[key] = (f"{self.sheets[target.start.sheet].name}!"
                              f"{render_range(target)}")
        return {
            "version": FILE_VERSION,
            "locale": self.locale.to_json(),
            "pinnedToday": self.today.isoformat(),
            "names": names,
            "sheets": sheets,
        }

    def save(self, path: str) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(dumps_canonical(self.to_json()))

    @classmethod
    def from_json(cls, data: dict) -> "Workbook":
        if not isinstance(data, dict):
            raise SchemaError("workbook document must be a JSON object")
        version = data.get("version")
        if version != FILE_VERSION:
            raise VersionMismatch(f"unsupported file version {version!r}")
        try:
            locale = LocaleProfile.from_json(data["locale"])
            today = datetime.date.fromisoformat(data["pinnedToday"])
        except (KeyError, TypeError, ValueError) as err:
            raise SchemaError(f"bad workbook header: {err}") from None
        wb = cls(locale=locale, today=today)
        wb.sheets = []
        sheet_specs = data.get("sheets", [])
        if not sheet_specs:
            raise SchemaError("workbook has no sheets")
        for spec in sheet_specs:
            name = spec.get("name")
            if not name or wb.resolve_sheet(name) is not None:
                raise SchemaError(f"bad sheet name {name!r}")
            index = len(wb.sheets)
            sheet = Sheet(name=name)
            wb.sheets.append(sheet)
            for key, cell_spec in spec.get("cells", {}).items():
                try:
                    addr = parse_addr(key, sheet=index)
                except Exception:
                    raise SchemaError(
                        f"sheet {name!r}: cell key {key!r} is not an A1 address"
                    ) from None
                entry = cell_spec.get("entry")
                if entry is not None:
                    wb.apply_entry(addr, entry)
                if "format" in cell_spec:
                    wb.ensure_cell(addr).format = DisplayFormat.from_json(
                        cell_spec["format"])
                if "style" in cell_spec:
                    wb.ensure_cell(addr).style = StyleState.from_json(
                        cell_spec["style"])
            sheet.hidden_rows = set(spec.get("hiddenRows", []))
            sheet.hidden_cols = set(spec.get("hiddenCols", []))
            sheet.filter = tableops.filter_from_json(spec.get("filter"))
        for key, text in data.get("names", {}).items():
            wb._names[key] = wb._parse_name_target(text)
        wb.recalc_all()
        wb.revision = 0
        return wb

    def _parse_name_target(self, text: str) -> Union[CellAddr, CellRange]:
        sheet_name, sep, rest = text.partition("!")
        if not sep:
            raise SchemaError(f"name target {text!r} lacks a sheet prefix")
        index = self.resolve_sheet(sheet_name)
        if index is None:
            raise SchemaError(f"name target {text!r}: unknown sheet")
        try:
            if ":" in rest:
                return parse_range(rest, sheet=index)
            return parse_addr(rest, sheet=index)
        except Exception:
            raise SchemaError(f"name target {text!r} is not an address") from None

    @classmethod
    def load(cls, path: str) -> "Workbook":
        with open(path, encoding="utf-8") as fh:
            try:
                data = json.load(fh)
            except json.JSONDecodeError as err:
                raise SchemaError(f"not valid JSON: {err}") from None
        return cls.from_json(data)

    # -- iteration helpers

    def cells_of(self, sheet: int) -> Iterator:
        yield from self.sheets[sheet].cells.items()


def dumps_canonical(doc: dict) -> str:
    return json.dumps(doc, sort_keys=True, indent=2, ensure_ascii=False) + "\n"
