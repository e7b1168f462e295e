"""Command-line front end: REPL, batch scripts, server, and utilities.

Everything routes through the same Session dispatch as the wire protocol,
so a REPL `set`, a script line, and a WebSocket SetEntry are the same
operation. The pinned "today" used by date coercion can be overridden with
the GRIDBOOK_TODAY environment variable (ISO format, e.g. 2004-10-01),
which keeps scripted transcripts reproducible on any real day.
"""

from __future__ import annotations

import argparse
import datetime
import json
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path

from .addresses import parse_addr, render_addr, render_range
from .copyfill import locale_number_text
from .exercises import UnknownExercise, run_and_report
from .locales import DEFAULT_TODAY
from .session import Session
from .tableops import export_delimited
from .workbook import Workbook

ECHO_MODES = ("display", "entry", "explain")


def pinned_today() -> datetime.date:
    raw = os.environ.get("GRIDBOOK_TODAY")
    if not raw:
        return DEFAULT_TODAY
    try:
        return datetime.date.fromisoformat(raw)
    except ValueError:
        raise SystemExit(
            f"GRIDBOOK_TODAY={raw!r} is not an ISO date (YYYY-MM-DD)")


def new_session() -> Session:
    return Session(today=pinned_today())


# ---------------------------------------------------------------------- REPL

@dataclass
class ReplState:
    session: Session
    cursor: object = None  # CellAddr
    echo: str = "display"
    stopped: bool = False

    def __post_init__(self):
        if self.cursor is None:
            self.cursor = parse_addr("A1")

    @property
    def prompt(self) -> str:
        return render_addr(self.cursor) + "> "


def _dispatch(state: ReplState, verb: str, params: dict):
    return state.session.dispatch({"id": "repl", "verb": verb,
                                   "params": params})


def _echo_cell(state: ReplState) -> str:
    wb = state.session.wb
    if state.echo == "display":
        return wb.get_display(state.cursor)
    if state.echo == "entry":
        return wb.get_entry(state.cursor)
    entry = wb.get_entry(state.cursor)
    if not entry:
        return ""
    resp = _dispatch(state, "Explain",
                     {"text": entry, "addr": render_addr(state.cursor)})
    return resp["payload"]["trace"] if resp["ok"] else _fmt_error(resp)


def _fmt_error(resp: dict) -> str:
    err = resp["error"]
    return f"error {err['code']}: {err['message']}"


def _with_diagnostics(resp: dict, body: str) -> str:
    lines = [body] if body else []
    for diag in (resp.get("payload") or {}).get("diagnostics", []):
        lines.append(f"note: {diag}")
    return "\n".join(lines)


def repl_eval(line: str, state: ReplState) -> tuple:
    """One REPL line -> (output text, ok). State is updated in place."""
    stripped = line.strip()
    if not stripped:
        return "", True
    word, _, rest = stripped.partition(" ")
    word = word.lower()
    rest = rest.strip()

    if word in ("quit", "exit"):
        state.stopped = True
        return "", True

    if word == "goto":
        try:
            state.cursor = parse_addr(rest)
        except ValueError as exc:
            return f"error BadAddress: {exc}", False
        return _echo_cell(state), True

    if word == "mode":
        if rest.lower() not in ECHO_MODES:
            return f"error BadParams: mode is one of {ECHO_MODES}", False
        state.echo = rest.lower()
        return f"echo mode: {state.echo}", True

    if word == "show":
        try:
            addr = parse_addr(rest) if rest else state.cursor
        except ValueError as exc:
            return f"error BadAddress: {exc}", False
        return state.session.wb.get_display(addr), True

    if word == "explain":
        resp = _dispatch(state, "Explain",
                         {"text": rest, "addr": render_addr(state.cursor)})
        if not resp["ok"]:
            return _fmt_error(resp), False
        return resp["payload"]["trace"], True

    if word == "set":
        return _repl_set(state, rest)

    if word == "fill":
        parts = rest.split()
        if len(parts) != 2:
            return "error BadParams: usage: fill <seed> <target>", False
        resp = _dispatch(state, "Fill",
                         {"seed": parts[0], "target": parts[1]})
        if not resp["ok"]:
            return _fmt_error(resp), False
        locale = state.session.wb.locale
        lines = []
        for rule in resp["payload"]["rules"]:
            text = f"lane {rule['lane']}: {rule['kind']}"
            if "step" in rule:
                text += f" step {locale_number_text(rule['step'], locale)}"
            lines.append(text)
        return "\n".join(lines), True

    if word == "copy":
        parts = rest.split()
        if len(parts) != 2:
            return "error BadParams: usage: copy <src> <dst>", False
        resp = _dispatch(state, "CopyBlock",
                         {"src": parts[0], "dst": parts[1]})
        if not resp["ok"]:
            return _fmt_error(resp), False
        return f"copied {parts[0]} -> {parts[1]} " \
               f"({len(resp['changes'])} cell(s) changed)", True

    if word == "chart":
        parts = rest.split()
        if not parts:
            return "error BadParams: usage: chart <spec.json> [out.svg]", \
                False
        try:
            spec = json.loads(Path(parts[0]).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            return f"error IoError: {exc}", False
        resp = _dispatch(state, "BuildChart", {"spec": spec})
        if not resp["ok"]:
            return _fmt_error(resp), False
        payload = resp["payload"]
        lines = [_chart_summary(payload)]
        if len(parts) > 1:
            try:
                Path(parts[1]).write_text(payload["svg"], encoding="utf-8")
            except OSError as exc:
                return f"error IoError: {exc}", False
            lines.append(f"wrote {parts[1]}")
        return "\n".join(lines), True

    if word in ("save", "load"):
        verb = "Save" if word == "save" else "Load"
        resp = _dispatch(state, verb, {"path": rest})
        if not resp["ok"]:
            return _fmt_error(resp), False
        return f"{word}ed {rest}", True

    if word == "exercise":
        import io

        buf = io.StringIO()
        try:
            ok = run_and_report(rest or "all", buf)
        except UnknownExercise:
            return f"error UnknownExercise: {rest!r}", False
        return buf.getvalue().rstrip("\n"), ok

    # anything else is an entry typed at the cursor
    return _repl_set(state, line.rstrip("\n"))


def _repl_set(state: ReplState, text: str) -> tuple:
    resp = _dispatch(state, "SetEntry",
                     {"addr": render_addr(state.cursor), "text": text})
    if not resp["ok"]:
        return _fmt_error(resp), False
    return _with_diagnostics(resp, _echo_cell(state)), True


def _chart_summary(payload: dict) -> str:
    lines = []
    scale = payload.get("scale")
    if scale:
        lines.append(f"axis: min {scale['min']:g} max {scale['max']:g} "
                     f"tick {scale['tick']:g}")
    findings = payload.get("lint", [])
    if findings:
        for f in findings:
            lines.append(f"lint {f['rule']}: {f['message']}")
    else:
        lines.append("lint: clean")
    return "\n".join(lines)


def run_repl(state: ReplState) -> int:
    print("gridbook — type entries at the cursor; "
          "'goto A1', 'show', 'explain <text>', 'quit'")
    while not state.stopped:
        try:
            line = input(state.prompt)
        except EOFError:
            print()
            break
        output, _ok = repl_eval(line, state)
        if output:
            print(output)
    return 0


def run_script(state: ReplState, path: str, out) -> int:
    """Replay a script: the transcript is deterministic byte-for-byte."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        print(f"error IoError: {exc}", file=sys.stderr)
        return 1
    all_ok = True
    for line in text.splitlines():
        out.write(state.prompt + line + "\n")
        output, ok = repl_eval(line, state)
        if output:
            out.write(output + "\n")
        all_ok = all_ok and ok
        if state.stopped:
            break
    return 0 if all_ok else 1


# ------------------------------------------------------------------ commands

def _cmd_repl(_args) -> int:
    return run_repl(ReplState(session=new_session()))


def _cmd_run(args) -> int:
    return run_script(ReplState(session=new_session()), args.script,
                      sys.stdout)


def _cmd_serve(args) -> int:
    from .server import serve

    session = new_session()
    if args.load:
        resp = session.dispatch({"id": "load", "verb": "Load",
                                 "params": {"path": args.load}})
        if not resp["ok"]:
            print(_fmt_error(resp), file=sys.stderr)
            return 1
    ui_dir = Path(args.ui_dir) if args.ui_dir else None
    print(f"serving on http://{args.host}:{args.port} "
          f"(WebSocket /session, health /health, UI /ui)")
    serve(session, host=args.host, port=args.port, ui_dir=ui_dir)
    return 0


def _cmd_exercise(args) -> int:
    try:
        ok = run_and_report(args.id, sys.stdout)
    except UnknownExercise:
        print(f"unknown exercise {args.id!r}; known: step1..step10 or all",
              file=sys.stderr)
        return 1
    return 0 if ok else 1


def _cmd_import(args) -> int:
    try:
        if args.file == "-":
            text = sys.stdin.read()
        else:
            text = Path(args.file).read_text(encoding="utf-8")
    except OSError as exc:
        print(f"error IoError: {exc}", file=sys.stderr)
        return 1
    session = new_session()
    resp = session.dispatch({"id": "import", "verb": "Import", "params": {
        "text": text, "delimiter": args.delim, "anchor": args.anchor,
        "headerRow": args.header, "allowFormulas": args.allow_formulas}})
    if not resp["ok"]:
        print(_fmt_error(resp), file=sys.stderr)
        return 1
    wb = session.wb
    cells = list(wb.cells_of(0))
    print(f"imported: {resp['payload']['cellsChanged']} cell(s) changed")
    if cells:
        from .addresses import CellAddr, CellRange

        rows = [a.row for a, _ in cells]
        cols = [a.col for a, _ in cells]
        region = CellRange(CellAddr(0, min(rows), min(cols)),
                           CellAddr(0, max(rows), max(cols)))
        print(f"used range {render_range(region)}:")
        sys.stdout.write(export_delimited(wb, region,
                                          delimiter=args.delim))
    if args.save:
        wb.save(args.save)
        print(f"saved workbook to {args.save}")
    return 0


def _cmd_explain(args) -> int:
    session = new_session()
    resp = session.dispatch({"id": "explain", "verb": "Explain",
                             "params": {"text": args.string}})
    if not resp["ok"]:
        print(_fmt_error(resp), file=sys.stderr)
        return 1
    print(resp["payload"]["trace"])
    return 0


def _cmd_chart(args) -> int:
    try:
        doc = json.loads(Path(args.spec).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        print(f"error IoError: {exc}", file=sys.stderr)
        return 1
    if not isinstance(doc, dict):
        print("error BadParams: chart file must hold an object",
              file=sys.stderr)
        return 1
    wb_path = doc.get("workbook")
    if wb_path:
        try:
            wb = Workbook.load(str(Path(args.spec).parent / wb_path)
                               if not Path(wb_path).is_absolute()
                               else wb_path)
        except Exception as exc:
            print(f"error IoError: {exc}", file=sys.stderr)
            return 1
        session = Session(workbook=wb)
    else:
        session = new_session()
    spec = doc.get("spec", doc if "kind" in doc else None)
    if spec is None:
        print("error BadParams: no chart spec found", file=sys.stderr)
        return 1
    resp = session.dispatch({"id": "chart", "verb": "BuildChart",
                             "params": {"spec": spec}})
    if not resp["ok"]:
        print(_fmt_error(resp), file=sys.stderr)
        return 1
    payload = resp["payload"]
    try:
        Path(args.out).write_text(payload["svg"], encoding="utf-8")
    except OSError as exc:
        print(f"error IoError: {exc}", file=sys.stderr)
        return 1
    print(_chart_summary(payload))
    print(f"wrote {args.out}")
    return 0


def _cmd_stdio(_args) -> int:
    from .session import run_stdio

    run_stdio(new_session(), sys.stdin, sys.stdout)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gridbook",
        description="a small spreadsheet engine for learning how "
                    "spreadsheets think")
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("repl", help="interactive grid session")

    p_run = sub.add_parser("run", help="replay a REPL script file")
    p_run.add_argument("script")

    p_serve = sub.add_parser("serve", help="HTTP/WebSocket server")
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--port", type=int, default=8000)
    p_serve.add_argument("--ui-dir", default=None,
                         help="directory with the built UI bundle")
    p_serve.add_argument("--load", default=None,
                         help="workbook JSON to load on startup")

    p_ex = sub.add_parser("exercise", help="run the didactical scenarios")
    p_ex.add_argument("id", help="step1..step10 or 'all'")

    p_imp = sub.add_parser("import", help="import delimited text")
    p_imp.add_argument("file", help="path or - for stdin")
    p_imp.add_argument("--delim", default=";")
    p_imp.add_argument("--anchor", default="A1")
    p_imp.add_argument("--header", action="store_true",
                       help="treat the first record as text headers")
    p_imp.add_argument("--allow-formulas", action="store_true")
    p_imp.add_argument("--save", default=None,
                       help="write the resulting workbook JSON here")

    p_expl = sub.add_parser("explain", help="show the coercion trace "
                                            "for one entry string")
    p_expl.add_argument("string")

    p_chart = sub.add_parser("chart", help="render a chart spec to SVG")
    p_chart.add_argument("spec", help="JSON file: {workbook?, spec}")
    p_chart.add_argument("--out", required=True)

    sub.add_parser("stdio", help="NDJSON command loop on stdin/stdout")
    return parser


_DISPATCH = {
    "repl": _cmd_repl,
    "run": _cmd_run,
    "serve": _cmd_serve,
    "exercise": _cmd_exercise,
    "import": _cmd_import,
    "explain": _cmd_explain,
    "chart": _cmd_chart,
    "stdio": _cmd_stdio,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return _DISPATCH[args.command](args)


if __name__ == "__main__":
    sys.exit(main())
