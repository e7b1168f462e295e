import pytest
from hypothesis import given
from hypothesis import strategies as st

from gridbook.addresses import (MAX_COLS, MAX_ROWS, CellAddr, CellRange,
                                MalformedAddress, col_letters, letters_to_col,
                                parse_addr, parse_range, render_addr,
                                render_range)


class TestColumnLetters:
    def test_known_columns(self):
        assert col_letters(0) == "A"
        assert col_letters(25) == "Z"
        assert col_letters(26) == "AA"
        assert col_letters(51) == "AZ"
        assert col_letters(52) == "BA"
        assert col_letters(701) == "ZZ"
        assert col_letters(702) == "AAA"
        assert col_letters(MAX_COLS - 1) == "XFD"

    @given(st.integers(min_value=0, max_value=MAX_COLS - 1))
    def test_round_trip(self, col):
        assert letters_to_col(col_letters(col)) == col

    def test_case_insensitive(self):
        assert letters_to_col("xfd") == MAX_COLS - 1


class TestParseAddr:
    def test_simple(self):
        assert parse_addr("A1") == CellAddr(0, 0, 0)
        assert parse_addr("C7") == CellAddr(0, 6, 2)
        assert parse_addr("aa100") == CellAddr(0, 99, 26)

    def test_bounds(self):
        parse_addr(f"A{MAX_ROWS}")
        with pytest.raises(MalformedAddress):
            parse_addr(f"A{MAX_ROWS + 1}")
        with pytest.raises(MalformedAddress):
            parse_addr("XFE1")

    @pytest.mark.parametrize("bad", ["", "A", "1", "A0", "1A", "A-1",
                                     "$A$1", "A1:B2", "A 1"])
    def test_malformed(self, bad):
        with pytest.raises(MalformedAddress):
            parse_addr(bad)

    @given(st.integers(0, 200), st.integers(0, 200))
    def test_render_parse_round_trip(self, row, col):
        addr = CellAddr(0, row, col)
        assert parse_addr(render_addr(addr)) == addr


class TestCellRange:
    def test_normalizes_corners(self):
        rng = CellRange(CellAddr(0, 5, 3), CellAddr(0, 1, 7))
        assert rng.start == CellAddr(0, 1, 3)
        assert rng.end == CellAddr(0, 5, 7)

    def test_dimensions(self):
        rng = parse_range("B2:D5")
        assert (rng.rows, rng.cols, rng.area) == (4, 3, 12)

    def test_iteration_is_row_major(self):
        rng = parse_range("A1:B2")
        assert [render_addr(a) for a in rng] == ["A1", "B1", "A2", "B2"]

    def test_contains(self):
        rng = parse_range("B2:C3")
        assert parse_addr("C3") in rng
        assert parse_addr("D3") not in rng

    def test_single_cell_range(self):
        rng = parse_range("B2")
        assert rng.area == 1 and rng.start == rng.end

    def test_render(self):
        assert render_range(parse_range("B2:C3")) == "B2:C3"
        assert render_range(parse_range("B2:B2")) == "B2:B2"
