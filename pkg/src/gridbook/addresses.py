"""Cell addresses and ranges in A1 notation.

Rows and columns are 0-based internally; A1 text is 1-based with bijective
base-26 column letters. Grid bounds mirror mainstream limits.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterator

MAX_ROWS = 1_048_576
MAX_COLS = 16_384


class MalformedAddress(ValueError):
    pass


@dataclass(frozen=True, order=True)
class CellAddr:
    sheet: int
    row: int
    col: int

    def offset(self, d_row: int, d_col: int) -> "CellAddr":
        return CellAddr(self.sheet, self.row + d_row, self.col + d_col)

    def in_bounds(self) -> bool:
        return 0 <= self.row < MAX_ROWS and 0 <= self.col < MAX_COLS


@dataclass(frozen=True)
class CellRange:
    start: CellAddr
    end: CellAddr

    def __post_init__(self) -> None:
        if self.start.sheet != self.end.sheet:
            raise ValueError("range endpoints must be on the same sheet")
        # normalize so start is the top-left corner
        r0, r1 = sorted((self.start.row, self.end.row))
        c0, c1 = sorted((self.start.col, self.end.col))
        object.__setattr__(self, "start", CellAddr(self.start.sheet, r0, c0))
        object.__setattr__(self, "end", CellAddr(self.end.sheet, r1, c1))

    @property
    def rows(self) -> int:
        return self.end.row - self.start.row + 1

    @property
    def cols(self) -> int:
        return self.end.col - self.start.col + 1

    @property
    def area(self) -> int:
        return self.rows * self.cols

    def __iter__(self) -> Iterator[CellAddr]:
        """Row-major iteration over every address in the range."""
        for r in range(self.start.row, self.end.row + 1):
            for c in range(self.start.col, self.end.col + 1):
                yield CellAddr(self.start.sheet, r, c)

    def __contains__(self, addr: CellAddr) -> bool:
        return (
            addr.sheet == self.start.sheet
            and self.start.row <= addr.row <= self.end.row
            and self.start.col <= addr.col <= self.end.col
        )


def col_letters(col: int) -> str:
    """0-based column index to bijective base-26 letters (0 -> A, 26 -> AA)."""
    if col < 0:
        raise ValueError(f"negative column {col}")
    out = ""
    n = col + 1
    while n > 0:
        n, rem = divmod(n - 1, 26)
        out = chr(ord("A") + rem) + out
    return out


def letters_to_col(letters: str) -> int:
    n = 0
    for ch in letters.upper():
        n = n * 26 + (ord(ch) - ord("A") + 1)
    return n - 1


_ADDR_RE = re.compile(r"^([A-Za-z]{1,3})([0-9]{1,7})$")
_RANGE_RE = re.compile(r"^([A-Za-z]{1,3}[0-9]{1,7}):([A-Za-z]{1,3}[0-9]{1,7})$")


def parse_addr(text: str, sheet: int = 0) -> CellAddr:
    """Parse an A1 string, case-insensitively. Raises MalformedAddress."""
    m = _ADDR_RE.match(text.strip())
    if not m:
        raise MalformedAddress(f"not an A1 address: {text!r}")
    col = letters_to_col(m.group(1))
    row = int(m.group(2)) - 1
    addr = CellAddr(sheet, row, col)
    if row < 0 or not addr.in_bounds():
        raise MalformedAddress(f"address out of grid bounds: {text!r}")
    return addr


def render_addr(addr: CellAddr) -> str:
    return f"{col_letters(addr.col)}{addr.row + 1}"


def parse_range(text: str, sheet: int = 0) -> CellRange:
    """Parse "A1:B2" or a single address as a 1x1 range."""
    text = text.strip()
    m = _RANGE_RE.match(text)
    if m:
        return CellRange(parse_addr(m.group(1), sheet), parse_addr(m.group(2), sheet))
    addr = parse_addr(text, sheet)
    return CellRange(addr, addr)


def render_range(rng: CellRange) -> str:
    return f"{render_addr(rng.start)}:{render_addr(rng.end)}"
