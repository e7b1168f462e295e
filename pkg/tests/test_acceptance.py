"""Acceptance gate: one test per primary behaviour contract.

Each test prints exactly one [PASS]/[FAIL] line (visible under -s; captured
stdout is shown by pytest on failure). Expected values are frozen from
independent oracles in oracles.py; nothing here is derived by running the
engine and pasting its own output back.
"""

import json
import random
import re
import subprocess
import sys
import time
from contextlib import contextmanager

from gridbook.addresses import CellAddr, parse_addr, parse_range, render_addr
from gridbook.charts import nice_scale
from gridbook.coercion import coerce
from gridbook.condformat import apply_cond_rules, make_rule
from gridbook.copyfill import copy_block, rewrite
from gridbook.exercises import EXERCISE_IDS, load_scenario
from gridbook.formats import FormatKind, StyleState
from gridbook.formula import (Binary, FuncCall, ParseError, RangeExpr,
                              RefExpr, Unary, parse, print_formula,
                              print_shape)
from gridbook.session import Session
from gridbook.values import CYCLE_ERROR, value_kind
from gridbook.workbook import Workbook, dumps_canonical

from oracles import is_125_step, nice_scale_oracle, rebuild_from_scratch
from test_formula import CORPUS as FORMULA_CORPUS


@contextmanager
def criterion(name):
    try:
        yield
    except BaseException:
        print(f"[FAIL] {name}")
        raise
    print(f"[PASS] {name}")


def put(wb, a, text):
    return wb.set_entry(parse_addr(a), text)


def disp(wb, a):
    return wb.get_display(parse_addr(a))


# ---------------------------------------------------------------- goldens

def test_step5_golden_pre_post_table():
    with criterion("step5-golden: pre/post percent table"):
        t0 = time.perf_counter()
        wb = Workbook()
        put(wb, "B2", "33%")
        put(wb, "C2", "70%")
        put(wb, "B3", "63%")
        put(wb, "C3", "86%")
        put(wb, "D2", "=C2-B2")
        put(wb, "D3", "=C3-B3")
        put(wb, "E2", "=(C2-B2)/(1-B2)")
        put(wb, "E3", "=(C3-B3)/(1-B3)")
        got = [disp(wb, a) for a in ("D2", "E2", "D3", "E3")]
        assert got == ["37%", "55%", "23%", "62%"], got
        for a in ("D2", "E2", "D3", "E3"):
            cell = wb.cell(parse_addr(a))
            assert cell.format.kind is FormatKind.PERCENT
            assert cell.format.decimals == 0
        elapsed = time.perf_counter() - t0
        assert elapsed < 1.0, f"took {elapsed:.3f}s"


def test_step6_golden_multiplication_table():
    with criterion("step6-golden: mixed-anchor table, one shape, "
                   "minimal ripple"):
        wb = Workbook()
        for row, v in zip((2, 3, 4, 5), (5, 7, 9, 3)):
            put(wb, f"M{row}", str(v))
        for col, v in zip("NOPQ", (6, 9, 8, 2)):
            put(wb, f"{col}1", str(v))
        put(wb, "N2", "=$M2*N$1")
        copy_block(wb, parse_range("N2:N2"), parse_range("N2:Q5"))

        want = [[30, 45, 40, 10],
                [42, 63, 56, 14],
                [54, 81, 72, 18],
                [18, 27, 24, 6]]
        for r, row_vals in zip((2, 3, 4, 5), want):
            for c, v in zip("NOPQ", row_vals):
                assert disp(wb, f"{c}{r}") == str(v), f"{c}{r}"

        shapes = set()
        for addr, cell in wb.sheets[0].cells.items():
            if cell.entry and cell.entry.startswith("="):
                shapes.add(print_shape(parse(cell.entry), addr))
        assert len(shapes) == 1, shapes

        changed = put(wb, "M2", "10")
        ripple = {render_addr(a) for a in changed}
        assert ripple == {"M2", "N2", "O2", "P2", "Q2"}, ripple


STEP3_TABLE = [
    # entry, value kind, format kind, fired rule — frozen from the ordered
    # rule table under the decimal-comma locale with today = 2004-10-01
    ("123", "Number", FormatKind.GENERAL, "number"),
    ("12/3", "Number", FormatKind.DATE, "date"),
    ("123,4567", "Number", FormatKind.GENERAL, "number"),
    ("12-3", "Number", FormatKind.DATE, "date"),
    ("12+3", "Text", FormatKind.GENERAL, "text"),
    ("12/12/12", "Number", FormatKind.DATE, "date"),
    ("63%", "Number", FormatKind.PERCENT, "percent"),
    ("12:3", "Number", FormatKind.TIME, "time"),
    ("12/15", "Text", FormatKind.GENERAL, "text"),
    ("22/22", "Text", FormatKind.GENERAL, "text"),
    ("29/2/4", "Number", FormatKind.DATE, "date"),
    ("29/2", "Number", FormatKind.DATE, "date"),
    ("13:63", "Text", FormatKind.GENERAL, "text"),
    ("25:30", "Number", FormatKind.DURATION, "time"),
    ("12/12", "Number", FormatKind.DATE, "date"),
    ("6:20", "Number", FormatKind.TIME, "time"),
    ("12/22", "Text", FormatKind.GENERAL, "text"),
    ("6:00", "Number", FormatKind.TIME, "time"),
]


def test_step3_coercion_corpus():
    with criterion("step3-corpus: 18 entries classify deterministically"):
        assert len(STEP3_TABLE) == 18
        for text, kind, fmt, rule in STEP3_TABLE:
            first = coerce(text)
            again = coerce(text)
            assert value_kind(first.value) == kind, text
            assert first.format.kind is fmt, text
            assert first.rule_fired == rule, text
            assert (first.value, first.format, first.rule_fired) == \
                   (again.value, again.format, again.rule_fired), text


def test_step7_conditional_rule_styles_six_fruits():
    with criterion("step7-golden: LEN(cell)>6 turns exactly six names red"):
        wb = Workbook()
        fruits = [("B2", "apple"), ("C2", "pear"), ("D2", "banana"),
                  ("E2", "cherry"), ("B3", "grapefruit"), ("C3", "apricot"),
                  ("D3", "pineapple"), ("E3", "hazelnut"), ("B4", "melon"),
                  ("C4", "orange"), ("D4", "lemon"), ("E4", "watermelon"),
                  ("B5", "grapefruit")]
        for a, name in fruits:
            put(wb, a, name)
        rule = make_rule(parse_range("B2:E6"), "LEN(cell)>6",
                         StyleState(color="red"), priority=1)
        overlay = apply_cond_rules(wb, [rule])
        styled = {render_addr(a) for a in overlay}
        assert styled == {"B3", "C3", "D3", "E3", "E4", "B5"}, styled
        assert all(s.color == "red" for s in overlay.values())


# ------------------------------------------------- randomized properties

def _random_workbook(rng, max_cells=200):
    """Acyclic workbook, formula depth <= 3, scalar refs only (so the
    reference set of every formula is exactly the A1 tokens in its text)."""
    wb = Workbook()
    n = rng.randint(5, max_cells)
    placed, depth = [], {}
    for i in range(n):
        a = CellAddr(0, i // 10, i % 10)
        shallow = [p for p in placed if depth[p] <= 2]
        if shallow and rng.random() < 0.45:
            k = rng.randint(1, min(3, len(shallow)))
            refs = rng.sample(shallow, k)
            op = rng.choice(["+", "-", "*"])
            wb.set_entry(a, "=" + op.join(render_addr(r) for r in refs))
            depth[a] = 1 + max(depth[r] for r in refs)
        else:
            wb.set_entry(a, str(rng.randint(-50, 50)))
            depth[a] = 0
        placed.append(a)
    return wb, placed, depth


def test_incremental_matches_batch_1000_cases():
    with criterion("incremental-vs-batch: 1000 random edit sequences"):
        t0 = time.perf_counter()
        rng = random.Random(20041001)
        for case in range(1000):
            max_cells = 200 if case % 50 == 0 else 40
            wb, placed, depth = _random_workbook(rng, max_cells)
            for _ in range(rng.randint(3, 10)):
                target = rng.choice(placed)
                if rng.random() < 0.5 or depth[target] == 0:
                    wb.set_entry(target, str(rng.randint(-50, 50)))
                else:
                    shallow = [p for p in placed
                               if depth[p] <= 2
                               and (p.row, p.col) < (target.row, target.col)]
                    if shallow:
                        ref = rng.choice(shallow)
                        wb.set_entry(target, f"={render_addr(ref)}+1")
            fresh = rebuild_from_scratch(wb)
            for p in placed:
                assert wb.value_at(p) == fresh.value_at(p), \
                    f"case {case}: {render_addr(p)}"
        elapsed = time.perf_counter() - t0
        assert elapsed < 30.0, f"took {elapsed:.1f}s"


def _random_formula_text(rng, depth=0):
    def ref():
        ca = "$" if rng.random() < 0.35 else ""
        ra = "$" if rng.random() < 0.35 else ""
        return f"{ca}{chr(65 + rng.randrange(26))}{ra}{rng.randint(1, 60)}"

    r = rng.random()
    if depth >= 3 or r < 0.30:
        leaf = rng.random()
        if leaf < 0.50:
            return ref()
        if leaf < 0.65:
            return str(rng.randrange(1000))
        if leaf < 0.80:
            r1, r2 = sorted((rng.randint(1, 40), rng.randint(1, 40)))
            c1, c2 = sorted((rng.randrange(26), rng.randrange(26)))
            fn = rng.choice(["SUM", "MIN", "MAX", "COUNT"])
            return f"{fn}({chr(65 + c1)}{r1}:{chr(65 + c2)}{r2})"
        if leaf < 0.90:
            return '"txt"'
        return rng.choice(["TRUE", "FALSE"])
    if r < 0.40:
        return f"-({_random_formula_text(rng, depth + 1)})"
    op = rng.choice(["+", "-", "*", "/", "^", "&", "<", "=", ">="])
    return (f"({_random_formula_text(rng, depth + 1)}{op}"
            f"{_random_formula_text(rng, depth + 1)})")


def _ref_pairs(a, b):
    if isinstance(a, RefExpr):
        yield a, b
    elif isinstance(a, RangeExpr):
        yield a.start, b.start
        yield a.end, b.end
    elif isinstance(a, FuncCall):
        for x, y in zip(a.args, b.args):
            yield from _ref_pairs(x, y)
    elif isinstance(a, Unary):
        yield from _ref_pairs(a.expr, b.expr)
    elif isinstance(a, Binary):
        yield from _ref_pairs(a.lhs, b.lhs)
        yield from _ref_pairs(a.rhs, b.rhs)


def test_rewrite_algebra_1000_random_asts():
    with criterion("rewrite-algebra: composition, identity, "
                   "absolute-axis immunity"):
        t0 = time.perf_counter()
        rng = random.Random(7)
        for case in range(1000):
            ast = parse("=" + _random_formula_text(rng))
            r1, c1 = rng.randint(0, 25), rng.randint(0, 25)
            r2, c2 = rng.randint(0, 25), rng.randint(0, 25)

            composed = rewrite(rewrite(ast, r1, c1), r2, c2)
            direct = rewrite(ast, r1 + r2, c1 + c2)
            assert print_formula(composed) == print_formula(direct), case

            assert print_formula(rewrite(ast, 0, 0)) == \
                print_formula(ast), case

            moved = rewrite(ast, r1, c1)
            for before, after in _ref_pairs(ast, moved):
                want_row = before.row if before.row_abs else before.row + r1
                want_col = before.col if before.col_abs else before.col + c1
                assert (after.row, after.col) == (want_row, want_col), case
        elapsed = time.perf_counter() - t0
        assert elapsed < 10.0, f"took {elapsed:.1f}s"


_REF_TOKEN = re.compile(r"[A-Z]{1,2}[0-9]+")


def test_cycle_detection_poisons_exactly_downstream():
    with criterion("cycle-detection: ring and downstream get #CYCLE!, "
                   "rest match batch"):
        rng = random.Random(99)
        for case in range(120):
            wb, placed, _depth = _random_workbook(rng, max_cells=35)
            ring = rng.sample(placed, rng.randint(2, min(4, len(placed))))
            for i, a in enumerate(ring):
                nxt = ring[(i + 1) % len(ring)]
                wb.set_entry(a, f"={render_addr(nxt)}+1")

            # independent reachability oracle over the entry texts: the
            # generator only emits scalar A1 refs, so token scan == ref set
            reads = {}
            for p in placed:
                entry = wb.get_entry(p)
                reads[render_addr(p)] = (
                    set(_REF_TOKEN.findall(entry))
                    if entry.startswith("=") else set())
            closure = {}
            for start in reads:
                seen, stack = set(), list(reads[start])
                while stack:
                    cur = stack.pop()
                    if cur in seen or cur not in reads:
                        continue
                    seen.add(cur)
                    stack.extend(reads[cur])
                closure[start] = seen
            on_cycle = {a for a in reads if a in closure[a]}
            poisoned = {a for a in reads if closure[a] & on_cycle}
            assert on_cycle and on_cycle <= poisoned

            fresh = rebuild_from_scratch(wb)
            for p in placed:
                name = render_addr(p)
                if name in poisoned:
                    assert wb.value_at(p) == CYCLE_ERROR, f"case {case} {name}"
                else:
                    assert wb.value_at(p) == fresh.value_at(p), \
                        f"case {case} {name}"


FUZZ_ALPHABET = "=()+-*/^&<>;:$%!#.,\"' AB12Sheet@\t"


def test_parser_round_trip_and_fuzz():
    with criterion("parser-round-trip: corpus fixpoint, fuzz never "
                   "crashes, offsets in range"):
        assert len(FORMULA_CORPUS) >= 50
        for text in FORMULA_CORPUS:
            printed = print_formula(parse(text))
            assert print_formula(parse(printed)) == printed, text

        rng = random.Random(4242)
        for _ in range(3000):
            text = "=" + "".join(rng.choice(FUZZ_ALPHABET)
                                 for _ in range(rng.randint(0, 24)))
            try:
                ast = parse(text)
            except ParseError as err:
                assert 0 <= err.offset <= len(text), text
            else:
                printed = print_formula(ast)
                assert print_formula(parse(printed)) == printed, text


def test_persistence_round_trip_all_exercise_workbooks():
    with criterion("persistence: save-load-save byte-stable, displays "
                   "reproduced for every exercise workbook"):
        for exercise_id in EXERCISE_IDS:
            session = Session()
            for i, cmd in enumerate(load_scenario(exercise_id)["setup"]):
                resp = session.dispatch({"id": f"s{i}", "verb": cmd["verb"],
                                         "params": cmd.get("params", {})})
                assert resp["ok"], (exercise_id, i, resp)
            wb = session.wb
            first = dumps_canonical(wb.to_json())
            loaded = Workbook.from_json(json.loads(first))
            second = dumps_canonical(loaded.to_json())
            assert first == second, exercise_id
            for sheet, fresh_sheet in zip(wb.sheets, loaded.sheets):
                assert set(sheet.cells) == set(fresh_sheet.cells)
                for addr in sheet.cells:
                    assert loaded.get_display(addr) == \
                        wb.get_display(addr), (exercise_id, render_addr(addr))


def test_nice_scale_10000_random_ranges():
    with criterion("nice-scale: 1-2-5 ticks, <=11 intervals, bounds "
                   "cover data, oracle agreement"):
        rng = random.Random(125)
        for case in range(10_000):
            mag = 10.0 ** rng.uniform(-6, 6)
            a = rng.uniform(-1.0, 1.0) * mag
            b = a if case % 97 == 0 else rng.uniform(-1.0, 1.0) * mag
            scale = nice_scale(a, b)
            lo, hi = min(a, b), max(a, b)
            assert is_125_step(scale.tick), (a, b, scale)
            assert scale.min <= lo and scale.max >= hi, (a, b, scale)
            intervals = round((scale.max - scale.min) / scale.tick)
            assert 1 <= intervals <= 11, (a, b, scale)
            assert (scale.min, scale.max, scale.tick) == \
                nice_scale_oracle(a, b), (a, b)


def test_exercise_runner_all_exits_zero():
    with criterion("exercise-runner: `exercise all` exits 0, "
                   "every step passes"):
        proc = subprocess.run(
            [sys.executable, "-m", "gridbook", "exercise", "all"],
            capture_output=True, text=True, timeout=120)
        assert proc.returncode == 0, proc.stdout + proc.stderr
        for i in range(1, 11):
            assert f"step{i}: PASS" in proc.stdout, proc.stdout
