"""The command session: one workbook, one client, a verb-based protocol.

Every mutation of the grid flows through `Session.dispatch`, which takes a
JSON-shaped command `{id, verb, params}` and answers with a response
`{id, ok, revision, changes, payload?, error?}`. The same dispatcher backs
the stdio NDJSON loop, the WebSocket endpoint, the REPL, and the exercise
runner, so every front end observes identical behavior.

`changes` is exact: it lists every cell whose display string or effective
style differs from before the command — including ripple effects of
recalculation and conditional-format flips — and nothing else. The session
keeps a rendered snapshot of the sheet between commands and diffs against
it, so the list is correct by construction rather than by bookkeeping.

Each change carries both the `display` string (what a human sees, locale
decimal separator and all) and a `machine` field (canonical full-precision
decimal text with a dot), so downstream consumers never have to re-parse a
localized display string.
"""

from __future__ import annotations

import json
from typing import Optional, TextIO

from .addresses import (CellAddr, CellRange, MalformedAddress, col_letters,
                        letters_to_col, parse_addr, parse_range, render_addr,
                        render_range)
from .charts import (ChartError, build_chart, lint_chart, nice_scale,
                     render_svg, spec_from_json)
from .coercion import explain
from .condformat import apply_cond_rules, make_rule
from .copyfill import FillError, copy_block, fill
from .formats import PLAIN, DisplayFormat, StyleState, machine_text
from .formula import ParseError, parse, print_formula, print_shape
from .locales import DEFAULT_TODAY, PAPER_FR, LocaleProfile
from .tableops import (ImportOutOfBounds, ImportSpec, UnbalancedQuote,
                       filter_from_json, filter_hidden_rows, filter_to_json,
                       import_delimited, set_hidden)
from .workbook import PersistenceError, SchemaError, VersionMismatch, Workbook

VERBS = ("SetEntry", "CopyBlock", "Fill", "SetFormat", "AddCondRule",
         "SetHidden", "SetFilter", "Import", "BuildChart", "Explain",
         "Save", "Load", "SnapshotRequest")


class SessionError(Exception):
    """A command that cannot be executed; becomes an ok:false response."""

    def __init__(self, code: str, message: str):
        super().__init__(message)
        self.code = code
        self.message = message


def _req(params: dict, key: str, kind=str):
    if key not in params:
        raise SessionError("BadParams", f"missing required param {key!r}")
    value = params[key]
    if kind is str and not isinstance(value, str):
        raise SessionError("BadParams", f"param {key!r} must be a string")
    return value


class Session:
    def __init__(self, workbook: Optional[Workbook] = None, *,
                 locale: LocaleProfile = PAPER_FR, today=None):
        self.wb = workbook if workbook is not None else Workbook(
            locale=locale, today=today or DEFAULT_TODAY)
        self.rules: list = []
        self._overlay: dict = {}
        self._last_map: dict = self._state_map()

    # -- styles -----------------------------------------------------------

    def effective_style(self, addr: CellAddr) -> StyleState:
        cell = self.wb.cell(addr)
        base = cell.style if cell is not None else PLAIN
        overlay = self._overlay.get(addr)
        return overlay.merged_over(base) if overlay is not None else base

    def restyle(self) -> None:
        self._overlay = apply_cond_rules(self.wb, self.rules)

    # -- the rendered-state diff -------------------------------------------

    def _state_map(self) -> dict:
        state = {}
        for si in range(len(self.wb.sheets)):
            for addr, _cell in self.wb.cells_of(si):
                state[addr] = (self.wb.get_display(addr),
                               self.effective_style(addr))
        for addr in self._overlay:
            if addr not in state:
                state[addr] = ("", self.effective_style(addr))
        return state

    def _diff(self, before: dict, after: dict) -> list:
        blank = ("", PLAIN)
        touched = set(before) | set(after)
        changes = []
        for addr in sorted(touched):
            if before.get(addr, blank) != after.get(addr, blank):
                display, style = after.get(addr, blank)
                changes.append({
                    "addr": render_addr(addr),
                    "sheet": self.wb.sheets[addr.sheet].name,
                    "display": display,
                    "machine": machine_text(self.wb.value_at(addr)),
                    "style": style.to_json(),
                })
        return changes

    # -- dispatch -----------------------------------------------------------

    def dispatch(self, cmd) -> dict:
        cmd_id = cmd.get("id") if isinstance(cmd, dict) else None
        try:
            if not isinstance(cmd, dict):
                raise SessionError("BadParams", "command must be an object")
            verb = cmd.get("verb")
            if not isinstance(verb, str) or verb not in VERBS:
                raise SessionError("UnknownVerb", f"unknown verb {verb!r}")
            params = cmd.get("params", {})
            if not isinstance(params, dict):
                raise SessionError("BadParams", "params must be an object")
            diag_start = len(self.wb.diagnostics)
            handler = getattr(self, "_cmd_" + _snake(verb))
            payload = handler(params)
            self.restyle()
            new_map = self._state_map()
            changes = self._diff(self._last_map, new_map)
            self._last_map = new_map
            new_diags = self.wb.diagnostics[diag_start:]
            if new_diags:
                payload = dict(payload or {})
                payload["diagnostics"] = list(new_diags)
            resp = {"id": cmd_id, "ok": True,
                    "revision": self.wb.revision, "changes": changes}
            if payload:
                resp["payload"] = payload
            return resp
        except SessionError as exc:
            return self._error(cmd_id, exc.code, exc.message)
        except MalformedAddress as exc:
            return self._error(cmd_id, "BadAddress", str(exc))
        except ParseError as exc:
            return self._error(cmd_id, "ParseError",
                               f"{exc.message} at offset {exc.offset}")
        except UnbalancedQuote as exc:
            return self._error(cmd_id, "UnbalancedQuote", str(exc))
        except ImportOutOfBounds as exc:
            return self._error(cmd_id, "OutOfBounds", str(exc))
        except FillError as exc:
            return self._error(cmd_id, "FillError", str(exc))
        except ChartError as exc:
            code = ("EmptySeries" if type(exc).__name__ == "EmptySeries"
                    else "ChartSpecError")
            return self._error(cmd_id, code, str(exc))
        except VersionMismatch as exc:
            return self._error(cmd_id, "VersionMismatch", str(exc))
        except SchemaError as exc:
            return self._error(cmd_id, "SchemaError", str(exc))
        except PersistenceError as exc:
            return self._error(cmd_id, "IoError", str(exc))
        except OSError as exc:
            return self._error(cmd_id, "IoError", str(exc))
        except (ValueError, KeyError, TypeError) as exc:
            return self._error(cmd_id, "BadParams", str(exc))

    def _error(self, cmd_id, code: str, message: str) -> dict:
        return {"id": cmd_id, "ok": False, "revision": self.wb.revision,
                "changes": [], "error": {"code": code, "message": message}}

    def _sheet_index(self, params: dict) -> int:
        name = params.get("sheet")
        if name is None:
            return 0
        idx = self.wb.resolve_sheet(str(name))
        if idx is None:
            raise SessionError("BadParams", f"no sheet named {name!r}")
        return idx

    # -- verb handlers -------------------------------------------------------

    def _cmd_set_entry(self, p: dict):
        sheet = self._sheet_index(p)
        addr = parse_addr(_req(p, "addr"), sheet=sheet)
        self.wb.set_entry(addr, _req(p, "text"))
        return None

    def _cmd_copy_block(self, p: dict):
        sheet = self._sheet_index(p)
        src = parse_range(_req(p, "src"), sheet=sheet)
        dst = parse_range(_req(p, "dst"), sheet=sheet)
        copy_block(self.wb, src, dst)
        return None

    def _cmd_fill(self, p: dict):
        sheet = self._sheet_index(p)
        seed = parse_range(_req(p, "seed"), sheet=sheet)
        target = parse_range(_req(p, "target"), sheet=sheet)
        result = fill(self.wb, seed, target)
        rules = []
        for lane, rule in result.rules:
            entry = {"lane": lane, "kind": rule.kind}
            if rule.step is not None:
                entry["step"] = rule.step
            rules.append(entry)
        return {"rules": rules}

    def _cmd_set_format(self, p: dict):
        sheet = self._sheet_index(p)
        rng = parse_range(_req(p, "range"), sheet=sheet)
        fmt_json = p.get("format")
        if not isinstance(fmt_json, dict):
            raise SessionError("BadParams", "format must be an object")
        fmt = DisplayFormat.from_json(fmt_json)
        self.wb.set_format(rng, fmt)
        return None

    def _cmd_add_cond_rule(self, p: dict):
        sheet = self._sheet_index(p)
        rng = parse_range(_req(p, "range"), sheet=sheet)
        style_json = p.get("style")
        if not isinstance(style_json, dict):
            raise SessionError("BadParams", "style must be an object")
        style = StyleState.from_json(style_json)
        priority = p.get("priority", len(self.rules))
        if not isinstance(priority, int) or isinstance(priority, bool):
            raise SessionError("BadParams", "priority must be an integer")
        rule = make_rule(rng, _req(p, "predicate"), style, priority)
        self.rules.append(rule)
        self.wb.revision += 1  # the rule set is part of observable state
        return {"ruleCount": len(self.rules)}

    def _cmd_set_hidden(self, p: dict):
        sheet = self._sheet_index(p)
        axis = _req(p, "axis")
        if axis not in ("rows", "cols"):
            raise SessionError("BadParams",
                               "axis must be 'rows' or 'cols'")
        raw = p.get("indices")
        if not isinstance(raw, list):
            raise SessionError("BadParams", "indices must be a list")
        if axis == "rows":
            # rows arrive as the 1-based numbers users see
            try:
                indices = {int(r) - 1 for r in raw}
            except (TypeError, ValueError):
                raise SessionError("BadParams", "row indices must be numbers")
            if any(r < 0 for r in indices):
                raise SessionError("BadParams", "row numbers start at 1")
        else:
            # columns arrive as letters
            indices = {letters_to_col(str(c)) for c in raw}
        hidden = p.get("hidden")
        if not isinstance(hidden, bool):
            raise SessionError("BadParams", "hidden must be a boolean")
        if set_hidden(self.wb.sheets[sheet], axis, indices, hidden):
            self.wb.revision += 1
        return None

    def _cmd_set_filter(self, p: dict):
        sheet = self._sheet_index(p)
        sheet_obj = self.wb.sheets[sheet]
        if p.get("clauses") is None:
            spec = None
        else:
            spec = filter_from_json(
                {"region": _req(p, "region"), "clauses": p["clauses"]},
                sheet=sheet)
        if sheet_obj.filter != spec:
            sheet_obj.filter = spec
            self.wb.revision += 1
        if spec is None:
            return {"visibleRows": None}
        hidden = filter_hidden_rows(sheet_obj, sheet)
        region = spec.region
        visible = [row + 1
                   for row in range(region.start.row, region.end.row + 1)
                   if row not in hidden]
        return {"visibleRows": visible}

    def _cmd_import(self, p: dict):
        sheet = self._sheet_index(p)
        text = _req(p, "text")
        spec = ImportSpec(
            delimiter=str(p.get("delimiter", ";")),
            quote=str(p.get("quote", '"')),
            header_row=bool(p.get("headerRow", False)),
            anchor=parse_addr(str(p.get("anchor", "A1")), sheet=sheet),
            allow_formulas=bool(p.get("allowFormulas", False)))
        changed = import_delimited(self.wb, text, spec)
        return {"cellsChanged": len(changed)}

    def _cmd_build_chart(self, p: dict):
        sheet = self._sheet_index(p)
        spec_json = p.get("spec")
        if not isinstance(spec_json, dict):
            raise SessionError("BadParams", "spec must be an object")
        spec = spec_from_json(spec_json, sheet=sheet)
        data = build_chart(self.wb, spec)
        report = lint_chart(data)
        payload = {"data": data.to_json(), "lint": report.to_json()}
        if data.kind != "pie":
            values = data.numeric_values()
            scale = nice_scale(min(values), max(values),
                               bar_nonneg=(data.kind == "bar"
                                           and data.y_start_at_zero))
            payload["scale"] = {"min": scale.min, "max": scale.max,
                                "tick": scale.tick}
            payload["svg"] = render_svg(data, scale)
        else:
            payload["scale"] = None
            payload["svg"] = render_svg(data)
        return payload

    def _cmd_explain(self, p: dict):
        text = _req(p, "text")
        sheet = self._sheet_index(p)
        anchor = parse_addr(str(p.get("addr", "A1")), sheet=sheet)
        if text.startswith("="):
            try:
                ast = parse(text)
            except ParseError as exc:
                trace = (f"PARSE ERROR at offset {exc.offset}: {exc.message}"
                         + (f" (expected {', '.join(exc.expected)})"
                            if exc.expected else ""))
            else:
                trace = (f"FORMULA {print_formula(ast)}\n"
                         f"SHAPE {print_shape(ast, anchor)}")
            return {"trace": trace}
        return {"trace": explain(text, locale=self.wb.locale,
                                 today=self.wb.today)}

    def _cmd_save(self, p: dict):
        path = _req(p, "path")
        self.wb.save(path)
        return {"path": path}

    def _cmd_load(self, p: dict):
        path = _req(p, "path")
        new_wb = Workbook.load(path)
        new_wb.revision = self.wb.revision + 1  # stays monotonic in-session
        self.wb = new_wb
        return {"path": path}

    def _cmd_snapshot_request(self, p: dict):
        sheet = self._sheet_index(p)
        sheet_obj = self.wb.sheets[sheet]
        window = parse_range(_req(p, "window"), sheet=sheet)
        visible_only = bool(p.get("visibleOnly", False))
        hidden_rows = set(sheet_obj.hidden_rows) | \
            filter_hidden_rows(sheet_obj, sheet)
        cells = []
        for addr in window:
            if visible_only and (addr.row in hidden_rows
                                 or addr.col in sheet_obj.hidden_cols):
                continue
            display = self.wb.get_display(addr)
            entry = self.wb.get_entry(addr)
            style = self.effective_style(addr)
            if not display and not entry and style == PLAIN:
                continue
            cells.append({
                "addr": render_addr(addr),
                "display": display,
                "machine": machine_text(self.wb.value_at(addr)),
                "entry": entry,
                "style": style.to_json(),
            })
        return {"snapshot": {
            "revision": self.wb.revision,
            "sheet": sheet_obj.name,
            "window": render_range(window),
            "cells": cells,
            "hiddenRows": sorted(r + 1 for r in sheet_obj.hidden_rows),
            "hiddenCols": sorted(col_letters(c)
                                 for c in sheet_obj.hidden_cols),
            "filter": filter_to_json(sheet_obj.filter),
        }}


def _snake(verb: str) -> str:
    out = []
    for i, ch in enumerate(verb):
        if ch.isupper() and i > 0:
            out.append("_")
        out.append(ch.lower())
    return "".join(out)


def run_stdio(session: Session, in_stream: TextIO,
              out_stream: TextIO) -> None:
    """NDJSON loop: one command per line in, one response per line out."""
    for line in in_stream:
        line = line.strip()
        if not line:
            continue
        try:
            cmd = json.loads(line)
        except json.JSONDecodeError as exc:
            resp = {"id": None, "ok": False,
                    "revision": session.wb.revision, "changes": [],
                    "error": {"code": "BadJson",
                              "message": f"not valid JSON: {exc}"}}
        else:
            resp = session.dispatch(cmd)
        out_stream.write(json.dumps(resp, ensure_ascii=False) + "\n")
        out_stream.flush()
