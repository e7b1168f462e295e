"""The executable didactical corpus: ten step scenarios, data not code.

Each scenario is a JSON file: a list of ordinary protocol commands (the
same verbs a client would send) plus a list of assertions over the
resulting grid. Teachers can author new trails by writing JSON — nothing
here needs rebuilding. Running a scenario on a fresh engine is
deterministic under the pinned clock and default locale, which makes the
corpus double as a regression suite.
"""

from __future__ import annotations

import json
import sys
from dataclasses import dataclass, field
from importlib import resources
from typing import Optional, TextIO

from .addresses import parse_addr, parse_range, render_addr
from .coercion import coerce, explain
from .formats import FormatKind
from .formula import print_shape
from .qp import decode_quoted_printable
from .session import Session
from .tableops import filter_hidden_rows
from .values import value_kind

EXERCISE_IDS = tuple(f"step{i}" for i in range(1, 11))


class UnknownExercise(KeyError):
    pass


@dataclass(frozen=True)
class AssertionResult:
    label: str
    ok: bool
    detail: str = ""


@dataclass
class ExerciseReport:
    exercise_id: str
    title: str
    setup_errors: list = field(default_factory=list)
    results: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.setup_errors and all(r.ok for r in self.results)


def load_scenario(exercise_id: str) -> dict:
    if exercise_id not in EXERCISE_IDS:
        raise UnknownExercise(exercise_id)
    data = resources.files("gridbook").joinpath(
        "exercises_data", exercise_id + ".json").read_text(encoding="utf-8")
    return json.loads(data)


def run_exercise(exercise_id: str) -> ExerciseReport:
    scenario = load_scenario(exercise_id)
    session = Session()
    report = ExerciseReport(exercise_id=exercise_id,
                            title=scenario.get("title", exercise_id))
    for i, cmd in enumerate(scenario.get("setup", [])):
        resp = session.dispatch({"id": f"setup-{i}", "verb": cmd["verb"],
                                 "params": cmd.get("params", {})})
        if not resp["ok"]:
            err = resp["error"]
            report.setup_errors.append(
                f"setup[{i}] {cmd['verb']}: {err['code']}: {err['message']}")
    for spec in scenario.get("assertions", []):
        report.results.append(_run_assertion(session, spec, report))
    return report


def _result(label: str, ok: bool, got, expected) -> AssertionResult:
    detail = "" if ok else f"expected {expected!r}, got {got!r}"
    return AssertionResult(label=label, ok=ok, detail=detail)


def _run_assertion(session: Session, spec: dict,
                   report: ExerciseReport) -> AssertionResult:
    wb = session.wb
    check = spec["check"]

    if check == "setupOk":
        return AssertionResult(label="setup commands all accepted",
                               ok=not report.setup_errors,
                               detail="; ".join(report.setup_errors))

    if check == "display":
        addr = parse_addr(spec["addr"])
        got = wb.get_display(addr)
        return _result(f"display {spec['addr']} = {spec['expected']!r}",
                       got == spec["expected"], got, spec["expected"])

    if check == "entry":
        addr = parse_addr(spec["addr"])
        got = wb.get_entry(addr)
        return _result(f"entry {spec['addr']} = {spec['expected']!r}",
                       got == spec["expected"], got, spec["expected"])

    if check == "valueKind":
        addr = parse_addr(spec["addr"])
        got = value_kind(wb.value_at(addr))
        return _result(f"value kind of {spec['addr']} is {spec['expected']}",
                       got == spec["expected"], got, spec["expected"])

    if check == "formatKind":
        addr = parse_addr(spec["addr"])
        cell = wb.cell(addr)
        got = cell.format.kind.value if cell else FormatKind.GENERAL.value
        return _result(f"format of {spec['addr']} is {spec['expected']}",
                       got == spec["expected"], got, spec["expected"])

    if check == "styleColor":
        addr = parse_addr(spec["addr"])
        got = session.effective_style(addr).color
        word = spec["expected"] if spec["expected"] else "unstyled"
        return _result(f"{spec['addr']} shows {word}",
                       got == spec["expected"], got, spec["expected"])

    if check == "styleCount":
        rng = parse_range(spec["range"])
        got = sum(1 for addr in rng
                  if session.effective_style(addr).color == spec["color"])
        return _result(
            f"{spec['range']} has {spec['expected']} {spec['color']} cells",
            got == spec["expected"], got, spec["expected"])

    if check == "coerce":
        res = coerce(spec["text"], locale=wb.locale, today=wb.today)
        got = {"kind": value_kind(res.value),
               "format": res.format.kind.value, "rule": res.rule_fired}
        want = {"kind": spec["kind"], "format": spec["format"],
                "rule": spec["rule"]}
        return _result(
            f"{spec['text']!r} -> {spec['kind']}/{spec['format']} "
            f"via rule {spec['rule']}", got == want, got, want)

    if check == "decodeQP":
        got = decode_quoted_printable(spec["text"])
        return _result(f"decode {spec['text']!r}",
                       got == spec["expected"], got, spec["expected"])

    if check == "traceEnds":
        got = explain(spec["text"], locale=wb.locale, today=wb.today)
        ok = got.endswith(spec["suffix"])
        return _result(f"trace of {spec['text']!r} ends {spec['suffix']!r}",
                       ok, got.splitlines()[-1] if got else "",
                       spec["suffix"])

    if check == "shapeCount":
        rng = parse_range(spec["range"])
        shapes = set()
        for addr in rng:
            cell = wb.cell(addr)
            if cell is not None and cell.ast is not None:
                shapes.add(print_shape(cell.ast, addr))
        return _result(
            f"{spec['range']} holds {spec['expected']} distinct "
            f"formula shape(s)", len(shapes) == spec["expected"],
            len(shapes), spec["expected"])

    if check == "editChanges":
        resp = session.dispatch({
            "id": "edit", "verb": "SetEntry",
            "params": {"addr": spec["addr"], "text": spec["text"]}})
        if not resp["ok"]:
            return AssertionResult(
                label=f"edit {spec['addr']} ripples", ok=False,
                detail=f"edit failed: {resp['error']}")
        got = {c["addr"] for c in resp["changes"]} - {spec["addr"]}
        want = set(spec["dependents"])
        return _result(
            f"editing {spec['addr']} changes exactly "
            f"{sorted(want)}", got == want, sorted(got), sorted(want))

    if check == "visibleRows":
        sheet_obj = wb.sheets[0]
        if sheet_obj.filter is None:
            return AssertionResult(label="visible rows under filter",
                                   ok=False, detail="no filter is set")
        hidden = filter_hidden_rows(sheet_obj, 0)
        region = sheet_obj.filter.region
        got = [row + 1
               for row in range(region.start.row, region.end.row + 1)
               if row not in hidden]
        return _result(f"filter leaves rows {spec['expected']} visible",
                       got == spec["expected"], got, spec["expected"])

    if check in ("chartLint", "chartScale", "chartError"):
        resp = session.dispatch({"id": "chart", "verb": "BuildChart",
                                 "params": {"spec": spec["spec"]}})
        title = spec.get("label", spec["spec"].get("kind", "chart"))
        if check == "chartError":
            got = resp["error"]["code"] if not resp["ok"] else "ok"
            return _result(f"chart {title}: expect error {spec['code']}",
                           got == spec["code"], got, spec["code"])
        if not resp["ok"]:
            return AssertionResult(label=f"chart {title}", ok=False,
                                   detail=f"build failed: {resp['error']}")
        if check == "chartLint":
            rules = [f["rule"] for f in resp["payload"]["lint"]]
            missing = [r for r in spec.get("contains", [])
                       if r not in rules]
            extra = [r for r in spec.get("absent", []) if r in rules]
            ok = not missing and not extra
            wanted = spec.get("contains", []) or "no findings"
            return _result(f"chart {title}: lint reports {wanted}",
                           ok, rules, spec.get("contains", []))
        got = resp["payload"]["scale"]
        want = {"min": spec["min"], "max": spec["max"], "tick": spec["tick"]}
        ok = (got is not None
              and abs(got["min"] - want["min"]) < 1e-9
              and abs(got["max"] - want["max"]) < 1e-9
              and abs(got["tick"] - want["tick"]) < 1e-9)
        return _result(f"chart {title}: axis {want}", ok, got, want)

    return AssertionResult(label=f"unknown check {check!r}", ok=False,
                           detail="assertion kind not recognized")


def print_report(report: ExerciseReport, out: TextIO) -> None:
    out.write(f"{report.exercise_id}: {report.title}\n")
    for err in report.setup_errors:
        out.write(f"  SETUP FAIL {err}\n")
    for res in report.results:
        mark = "PASS" if res.ok else "FAIL"
        line = f"  {mark} {res.label}"
        if res.detail:
            line += f" [{res.detail}]"
        out.write(line + "\n")
    total = len(report.results)
    good = sum(1 for r in report.results if r.ok)
    verdict = "PASS" if report.passed else "FAIL"
    out.write(f"{report.exercise_id}: {verdict} ({good}/{total} assertions)\n")


def run_and_report(which: str, out: Optional[TextIO] = None) -> bool:
    """Run one exercise or `all`; print reports; True iff everything passed."""
    out = out if out is not None else sys.stdout
    ids = EXERCISE_IDS if which == "all" else (which,)
    all_ok = True
    for exercise_id in ids:
        report = run_exercise(exercise_id)
        print_report(report, out)
        all_ok = all_ok and report.passed
    return all_ok
