import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gridbook.addresses import CellAddr, parse_addr, parse_range
from gridbook.tableops import (BoolClause, ColumnPredicate, FilterSpec,
                               ImportOutOfBounds, ImportSpec, UnbalancedQuote,
                               apply_filter, export_delimited,
                               filter_from_json, filter_hidden_rows,
                               filter_to_json, import_delimited,
                               parse_delimited, render_delimited, row_matches,
                               set_hidden)
from gridbook.values import value_kind
from gridbook.workbook import Workbook

from oracles import filter_rows_oracle


class TestParseDelimited:
    def test_simple(self):
        assert parse_delimited("a;b\nc;d\n", ";", '"') == [["a", "b"], ["c", "d"]]

    def test_empty_text(self):
        assert parse_delimited("", ";", '"') == []

    def test_empty_fields(self):
        assert parse_delimited(";;\n", ";", '"') == [["", "", ""]]

    def test_quoted_delimiter(self):
        assert parse_delimited('"a;b";c\n', ";", '"') == [["a;b", "c"]]

    def test_escaped_quote(self):
        assert parse_delimited('"say ""hi""";2\n', ";", '"') \
            == [['say "hi"', "2"]]

    def test_quoted_newline(self):
        assert parse_delimited('"two\nlines";x\n', ";", '"') \
            == [["two\nlines", "x"]]

    def test_crlf_records(self):
        assert parse_delimited("a;b\r\nc;d\r\n", ";", '"') \
            == [["a", "b"], ["c", "d"]]

    def test_no_trailing_newline(self):
        assert parse_delimited("a;b", ";", '"') == [["a", "b"]]

    def test_unbalanced_quote_reports_line(self):
        with pytest.raises(UnbalancedQuote) as exc:
            parse_delimited('ok;fine\n"broken;x\n', ";", '"')
        assert exc.value.line == 2

    def test_mid_field_quote_is_an_error(self):
        with pytest.raises(UnbalancedQuote) as exc:
            parse_delimited('a"b;c\n', ";", '"')
        assert exc.value.line == 1

    def test_text_after_closing_quote_is_an_error(self):
        with pytest.raises(UnbalancedQuote):
            parse_delimited('"ok"stray;x\n', ";", '"')

    def test_comma_delimiter(self):
        assert parse_delimited("1,2\n", ",", '"') == [["1", "2"]]


ROWS = st.lists(
    st.lists(st.text(alphabet="ab;\"\n,x ", max_size=8), min_size=1, max_size=4),
    min_size=1, max_size=5)


class TestRenderRoundTrip:
    @settings(max_examples=200, deadline=None)
    @given(ROWS)
    def test_render_then_parse_is_identity(self, rows):
        text = render_delimited(rows, ";", '"')
        assert parse_delimited(text, ";", '"') == rows


class TestImport:
    def test_basic_import_coerces(self):
        wb = Workbook()
        changed = import_delimited(wb, "33%;70%\n63%;86%\n",
                                   ImportSpec(anchor=parse_addr("B2")))
        assert len(changed) == 4
        assert wb.get_display(parse_addr("B2")) == "33%"
        assert wb.value_at(parse_addr("C3")) == pytest.approx(0.86)

    def test_import_mixed_kinds(self):
        wb = Workbook()
        import_delimited(wb, "12/3;13:63\n", ImportSpec(anchor=parse_addr("E1")))
        assert value_kind(wb.value_at(parse_addr("E1"))) == "Number"  # a date
        assert value_kind(wb.value_at(parse_addr("F1"))) == "Text"  # bad time

    def test_header_row_forced_to_text(self):
        wb = Workbook()
        import_delimited(wb, "age;score\n30;40\n",
                         ImportSpec(anchor=parse_addr("A1"), header_row=True))
        assert value_kind(wb.value_at(parse_addr("A1"))) == "Text"
        assert wb.value_at(parse_addr("A2")) == 30.0

    def test_header_that_looks_numeric_stays_text(self):
        wb = Workbook()
        import_delimited(wb, "2004;2005\n1;2\n",
                         ImportSpec(anchor=parse_addr("A1"), header_row=True))
        assert value_kind(wb.value_at(parse_addr("A1"))) == "Text"
        assert wb.get_display(parse_addr("A1")) == "2004"

    def test_formulas_inert_by_default(self):
        wb = Workbook()
        import_delimited(wb, "=1+1\n", ImportSpec(anchor=parse_addr("A1")))
        assert value_kind(wb.value_at(parse_addr("A1"))) == "Text"
        assert wb.get_display(parse_addr("A1")) == "=1+1"

    def test_formulas_live_when_allowed(self):
        wb = Workbook()
        import_delimited(wb, "=1+1\n",
                         ImportSpec(anchor=parse_addr("A1"), allow_formulas=True))
        assert wb.value_at(parse_addr("A1")) == 2.0

    def test_empty_fields_leave_cells_untouched(self):
        wb = Workbook()
        wb.set_entry(parse_addr("B1"), "keep")
        import_delimited(wb, "a;;c\n", ImportSpec(anchor=parse_addr("A1")))
        assert wb.get_display(parse_addr("B1")) == "keep"

    def test_out_of_bounds_raises_before_writing(self):
        from gridbook.addresses import MAX_COLS
        wb = Workbook()
        wide = ";".join(str(i) for i in range(MAX_COLS + 1)) + "\n"
        with pytest.raises(ImportOutOfBounds):
            import_delimited(wb, wide, ImportSpec(anchor=parse_addr("A1")))
        assert wb.cell(parse_addr("A1")) is None

    def test_import_recalculates_dependents(self):
        wb = Workbook()
        wb.set_entry(parse_addr("D1"), "=SUM(A1:A3)")
        import_delimited(wb, "1\n2\n3\n", ImportSpec(anchor=parse_addr("A1")))
        assert wb.value_at(parse_addr("D1")) == 6.0


class TestExport:
    def test_round_trips_entries(self):
        wb = Workbook()
        wb.set_entry(parse_addr("A1"), "1,5")
        wb.set_entry(parse_addr("B1"), "text")
        wb.set_entry(parse_addr("A2"), "=A1*2")
        text = export_delimited(wb, parse_range("A1:B2"))
        assert text == "1,5;text\n=A1*2;\n"

    def test_escape_apostrophe_stripped(self):
        wb = Workbook()
        wb.set_entry(parse_addr("A1"), "'=not a formula")
        text = export_delimited(wb, parse_range("A1:A1"))
        assert text == "=not a formula\n"

    def test_field_quoting(self):
        wb = Workbook()
        wb.set_entry(parse_addr("A1"), 'say "hi"')
        wb.set_entry(parse_addr("B1"), "a;b")
        text = export_delimited(wb, parse_range("A1:B1"))
        assert text == '"say ""hi""";"a;b"\n'
        assert parse_delimited(text, ";", '"') == [['say "hi"', "a;b"]]


def seeded_sheet(wb, rng, rows=20, cols=3):
    """Rows 1..rows (0-based) get random numbers/words/gaps; returns the
    row -> {col: value} map the brute-force oracle consumes."""
    values = {}
    for r in range(1, rows + 1):
        for c in range(cols):
            roll = rng.random()
            a = CellAddr(0, r, c)
            if roll < 0.5:
                v = rng.randint(0, 60)
                wb.set_entry(a, str(v))
                values.setdefault(r, {})[c] = float(v)
            elif roll < 0.75:
                word = rng.choice(["apple", "banana", "orange", "kiwi"])
                wb.set_entry(a, word)
                values.setdefault(r, {})[c] = word
            # else leave empty
    return values


def random_clause_json(rng, cols=3, depth=0):
    if depth < 2 and rng.random() < 0.35:
        kids = [random_clause_json(rng, cols, depth + 1)
                for _ in range(rng.randint(1, 3))]
        return {"op": rng.choice(["and", "or"]), "clauses": kids}
    col = rng.randrange(cols)
    op = rng.choice(["lt", "le", "gt", "ge", "equals", "contains", "nonempty"])
    if op in ("lt", "le", "gt", "ge"):
        return {"col": col, "op": op, "operand": float(rng.randint(0, 60))}
    if op == "equals":
        return {"col": col, "op": "equals",
                "operand": rng.choice([float(rng.randint(0, 60)), "banana"])}
    if op == "contains":
        return {"col": col, "op": "contains",
                "operand": rng.choice(["an", "APPLE", "x"])}
    return {"col": col, "op": "nonempty"}


class TestFilter:
    def test_contains_is_case_insensitive_substring(self):
        wb = Workbook()
        wb.set_entry(parse_addr("A1"), "banana")
        wb.set_entry(parse_addr("A2"), "orange")
        wb.set_entry(parse_addr("A3"), "kiwi")
        visible = apply_filter(wb.sheets[0], ColumnPredicate(0, "contains", "AN"),
                               parse_range("A1:A3"))
        assert visible == {0, 1}

    def test_numeric_predicates_ignore_text_rows(self):
        wb = Workbook()
        wb.set_entry(parse_addr("A1"), "10")
        wb.set_entry(parse_addr("A2"), "abc")
        visible = apply_filter(wb.sheets[0], ColumnPredicate(0, "ge", 5.0),
                               parse_range("A1:A2"))
        assert visible == {0}

    def test_and_or_composition(self):
        wb = Workbook()
        for i, (age, score) in enumerate([(25, 50), (35, 50), (25, 10)], start=1):
            wb.set_entry(parse_addr(f"A{i}"), str(age))
            wb.set_entry(parse_addr(f"B{i}"), str(score))
        clause = BoolClause("and", (ColumnPredicate(0, "le", 30.0),
                                    ColumnPredicate(1, "ge", 40.0)))
        visible = apply_filter(wb.sheets[0], clause, parse_range("A1:B3"))
        assert visible == {0}

    def test_filter_reads_computed_values(self):
        wb = Workbook()
        wb.set_entry(parse_addr("A1"), "=2*30")
        visible = apply_filter(wb.sheets[0], ColumnPredicate(0, "ge", 50.0),
                               parse_range("A1:A1"))
        assert visible == {0}

    @pytest.mark.parametrize("seed", range(8))
    def test_matches_brute_force_oracle(self, seed):
        rng = random.Random(seed)
        wb = Workbook()
        values = seeded_sheet(wb, rng)
        clause_json = random_clause_json(rng)
        spec = filter_from_json({"region": "A2:C21", "clauses": clause_json})
        via_engine = apply_filter(wb.sheets[0], spec.root, spec.region)
        via_oracle = filter_rows_oracle(values, clause_json)
        # the oracle never lists fully-empty rows; no predicate matches them
        assert via_engine == via_oracle

    def test_filter_json_round_trip(self):
        spec = FilterSpec(parse_range("A2:C21"),
                          BoolClause("and", (ColumnPredicate(2, "ge", 40.0),
                                             ColumnPredicate(0, "contains", "an"))))
        data = filter_to_json(spec)
        back = filter_from_json(data)
        assert back == spec
        assert filter_to_json(back) == data

    def test_filter_hidden_rows(self):
        wb = Workbook()
        for i, v in enumerate([10, 50, 20], start=1):
            wb.set_entry(parse_addr(f"A{i}"), str(v))
        wb.sheets[0].filter = FilterSpec(parse_range("A1:A3"),
                                         ColumnPredicate(0, "ge", 30.0))
        assert filter_hidden_rows(wb.sheets[0], 0) == {0, 2}

    def test_no_filter_hides_nothing(self):
        wb = Workbook()
        assert filter_hidden_rows(wb.sheets[0], 0) == set()


class TestHidden:
    def test_set_hidden_rows_and_change_reporting(self):
        wb = Workbook()
        sheet = wb.sheets[0]
        assert set_hidden(sheet, "rows", {2, 3}, True) is True
        assert sheet.hidden_rows == {2, 3}
        assert set_hidden(sheet, "rows", {2}, True) is False  # already hidden
        assert set_hidden(sheet, "rows", {2}, False) is True
        assert sheet.hidden_rows == {3}

    def test_set_hidden_cols(self):
        wb = Workbook()
        sheet = wb.sheets[0]
        assert set_hidden(sheet, "cols", {1}, True) is True
        assert sheet.hidden_cols == {1}

    def test_bad_axis_rejected(self):
        wb = Workbook()
        with pytest.raises(ValueError):
            set_hidden(wb.sheets[0], "diagonal", {1}, True)


class TestPredicateValidation:
    def test_numeric_ops_need_numbers(self):
        with pytest.raises(ValueError):
            ColumnPredicate(0, "lt", "abc")

    def test_unknown_op_rejected(self):
        with pytest.raises(ValueError):
            ColumnPredicate(0, "matches", 1.0)

    def test_empty_bool_clause_rejected(self):
        with pytest.raises(ValueError):
            BoolClause("and", ())
