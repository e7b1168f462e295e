"""Formula language: lexer, Pratt parser, AST, canonical printer.

The grammar is deliberately small. Formulas start with '='; literals use
'.' decimals regardless of locale; ';' separates function arguments so
decimal commas stay unambiguous. Precedence, high to low:

    unary -            (binds tighter than ^, so -2^2 is (-2)^2)
    ^                  right-associative
    * /
    + -
    &                  text concatenation
    = <> < <= > >=     non-associative: 1<2<3 is a parse error

Unknown function names parse fine and fail later as #NAME? — the grid
must accept the edit. The printer emits a normal form (uppercase columns
and function names, minimal parentheses) and parse(print(ast)) returns a
structurally equal tree.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Optional, Union

from .addresses import (
    MAX_COLS,
    MAX_ROWS,
    CellAddr,
    CellRange,
    col_letters,
    letters_to_col,
)
from .values import ERROR_TEXT, TEXT_TO_ERROR, ErrorKind

MAX_DEPTH = 100


class ParseError(Exception):
    """A rejected formula: where, why, and what would have been accepted."""

    def __init__(self, offset: int, message: str, expected: list | None = None):
        super().__init__(f"{message} at offset {offset}")
        self.offset = offset
        self.message = message
        self.expected = expected or []

    def to_json(self) -> dict:
        return {"offset": self.offset, "message": self.message,
                "expected": list(self.expected)}


# --- AST -------------------------------------------------------------------

@dataclass(frozen=True)
class NumberLit:
    value: float
    percent: bool = False  # "33%" keeps the written 33.0; evaluation divides


@dataclass(frozen=True)
class TextLit:
    value: str


@dataclass(frozen=True)
class BoolLit:
    value: bool


@dataclass(frozen=True)
class ErrorLit:
    kind: ErrorKind


@dataclass(frozen=True)
class RefExpr:
    col: int
    row: int
    col_abs: bool = False
    row_abs: bool = False
    sheet: Optional[str] = None


@dataclass(frozen=True)
class RangeExpr:
    start: RefExpr
    end: RefExpr


@dataclass(frozen=True)
class NameRef:
    name: str


@dataclass(frozen=True)
class FuncCall:
    name: str
    args: tuple = field(default=())


@dataclass(frozen=True)
class Unary:
    op: str
    expr: "FormulaAst"


@dataclass(frozen=True)
class Binary:
    op: str
    lhs: "FormulaAst"
    rhs: "FormulaAst"


FormulaAst = Union[NumberLit, TextLit, BoolLit, ErrorLit, RefExpr,
                   RangeExpr, NameRef, FuncCall, Unary, Binary]

COMPARISONS = ("=", "<>", "<=", ">=", "<", ">")

_BINARY_PREC = {"=": 10, "<>": 10, "<": 10, "<=": 10, ">": 10, ">=": 10,
                "&": 20, "+": 30, "-": 30, "*": 40, "/": 40, "^": 50}
_UNARY_PREC = 60
_ATOM_PREC = 100


# --- Lexer -----------------------------------------------------------------

@dataclass(frozen=True)
class Token:
    kind: str  # NUMBER TEXT BOOL ERROR REF IDENT OP LPAREN RPAREN SEMI COLON EOF
    text: str
    offset: int
    value: object = None


_NUMBER_RE = re.compile(r"(?:[0-9]+(?:\.[0-9]*)?|\.[0-9]+)(?:[eE][+-]?[0-9]+)?")
_REF_RE = re.compile(
    r"(?:([A-Za-z_][A-Za-z0-9_]*)!)?"
    r"(\$?)([A-Za-z]{1,3})(\$?)([0-9]{1,7})(?![A-Za-z0-9_$(])"
)
_IDENT_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")
_ERROR_RE = re.compile("|".join(re.escape(t) for t in sorted(ERROR_TEXT.values(),
                                                             key=len, reverse=True)))
_TWO_CHAR_OPS = ("<>", "<=", ">=")
_ONE_CHAR_OPS = "+-*/^&=<>"


def tokenize(text: str) -> list:
    """Lex body text (the '=' already stripped). Offsets index into `text`."""
    tokens = []
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch in " \t":
            i += 1
            continue
        if ch == '"':
            j = i + 1
            parts = []
            while True:
                if j >= n:
                    raise ParseError(i, "unterminated string literal", ['"'])
                if text[j] == '"':
                    if j + 1 < n and text[j + 1] == '"':
                        parts.append('"')
                        j += 2
                        continue
                    j += 1
                    break
                parts.append(text[j])
                j += 1
            tokens.append(Token("TEXT", text[i:j], i, "".join(parts)))
            i = j
            continue
        if ch == "#":
            m = _ERROR_RE.match(text, i)
            if not m:
                raise ParseError(i, "malformed error literal",
                                 sorted(ERROR_TEXT.values()))
            tokens.append(Token("ERROR", m.group(0), i, TEXT_TO_ERROR[m.group(0)]))
            i = m.end()
            continue
        if ch.isdigit() or ch == ".":
            m = _NUMBER_RE.match(text, i)
            if m:
                percent = m.end() < n and text[m.end()] == "%"
                end = m.end() + (1 if percent else 0)
                tokens.append(Token("NUMBER", text[i:end], i,
                                    (float(m.group(0)), percent)))
                i = end
                continue
        m = _REF_RE.match(text, i)
        if m:
            col = letters_to_col(m.group(3))
            row = int(m.group(5)) - 1
            if row < MAX_ROWS and col < MAX_COLS:
                ref = RefExpr(col=col, row=row,
                              col_abs=m.group(2) == "$", row_abs=m.group(4) == "$",
                              sheet=m.group(1))
                tokens.append(Token("REF", m.group(0), i, ref))
                i = m.end()
                continue
            # out-of-grid coordinates fall through to the identifier rule
        if ch == "$":
            raise ParseError(i, "stray '$'", ["cell reference"])
        m = _IDENT_RE.match(text, i)
        if m:
            word = m.group(0)
            if word.upper() in ("TRUE", "FALSE"):
                tokens.append(Token("BOOL", word, i, word.upper() == "TRUE"))
            else:
                tokens.append(Token("IDENT", word, i))
            i = m.end()
            continue
        if text[i:i + 2] in _TWO_CHAR_OPS:
            tokens.append(Token("OP", text[i:i + 2], i))
            i += 2
            continue
        if ch in _ONE_CHAR_OPS:
            tokens.append(Token("OP", ch, i))
            i += 1
            continue
        if ch == "(":
            tokens.append(Token("LPAREN", ch, i))
        elif ch == ")":
            tokens.append(Token("RPAREN", ch, i))
        elif ch == ";":
            tokens.append(Token("SEMI", ch, i))
        elif ch == ":":
            tokens.append(Token("COLON", ch, i))
        else:
            raise ParseError(i, f"unexpected character {ch!r}", [])
        i += 1
    tokens.append(Token("EOF", "", n))
    return tokens


# --- Parser ----------------------------------------------------------------

class _Parser:
    def __init__(self, tokens: list):
        self.tokens = tokens
        self.pos = 0

    def peek(self) -> Token:
        return self.tokens[self.pos]

    def advance(self) -> Token:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect(self, kind: str, what: str) -> Token:
        tok = self.peek()
        if tok.kind != kind:
            raise ParseError(tok.offset, f"expected {what}", [what])
        return self.advance()

    def parse_expr(self, min_bp: int, depth: int) -> FormulaAst:
        if depth > MAX_DEPTH:
            raise ParseError(self.peek().offset, "formula nested too deeply", [])
        lhs = self.parse_prefix(depth)
        compare_seen = False
        while True:
            tok = self.peek()
            if tok.kind != "OP":
                break
            bp = _BINARY_PREC[tok.text]
            if bp < min_bp:
                break
            if bp == 10:
                if compare_seen:
                    raise ParseError(tok.offset,
                                     "comparisons are non-associative; "
                                     "use parentheses", [")"])
                compare_seen = True
            self.advance()
            # right-assoc ^ re-enters at its own level, everything else above
            rhs_bp = bp if tok.text == "^" else bp + 1
            rhs = self.parse_expr(rhs_bp, depth + 1)
            lhs = Binary(tok.text, lhs, rhs)
        return lhs

    def parse_prefix(self, depth: int) -> FormulaAst:
        tok = self.peek()
        if tok.kind == "OP" and tok.text == "-":
            self.advance()
            return Unary("-", self.parse_expr(_UNARY_PREC, depth + 1))
        if tok.kind == "NUMBER":
            self.advance()
            value, percent = tok.value
            return NumberLit(value, percent)
        if tok.kind == "TEXT":
            self.advance()
            return TextLit(tok.value)
        if tok.kind == "BOOL":
            self.advance()
            return BoolLit(tok.value)
        if tok.kind == "ERROR":
            self.advance()
            return ErrorLit(tok.value)
        if tok.kind == "REF":
            self.advance()
            start = tok.value
            if self.peek().kind == "COLON":
                self.advance()
                end_tok = self.expect("REF", "cell reference")
                end = end_tok.value
                if end.sheet is not None:
                    if start.sheet is None or end.sheet.lower() != start.sheet.lower():
                        raise ParseError(end_tok.offset,
                                         "range endpoints must be on one sheet", [])
                    end = RefExpr(end.col, end.row, end.col_abs, end.row_abs, None)
                return RangeExpr(start, end)
            return start
        if tok.kind == "IDENT":
            self.advance()
            if self.peek().kind == "LPAREN":
                self.advance()
                args = []
                if self.peek().kind != "RPAREN":
                    args.append(self.parse_expr(0, depth + 1))
                    while self.peek().kind == "SEMI":
                        self.advance()
                        args.append(self.parse_expr(0, depth + 1))
                self.expect("RPAREN", "')'")
                return FuncCall(tok.text.upper(), tuple(args))
            return NameRef(tok.text.upper())
        if tok.kind == "LPAREN":
            self.advance()
            inner = self.parse_expr(0, depth + 1)
            self.expect("RPAREN", "')'")
            return inner
        raise ParseError(tok.offset, "expected an expression",
                         ["number", "string", "reference", "function", "("])


def parse(formula_text: str) -> FormulaAst:
    """Parse a leading-'=' formula. Raises ParseError; never panics."""
    if not formula_text.startswith("="):
        raise ParseError(0, "formula must start with '='", ["="])
    body = formula_text[1:]
    try:
        tokens = tokenize(body)
        parser = _Parser(tokens)
        ast = parser.parse_expr(0, 0)
        tail = parser.peek()
        if tail.kind != "EOF":
            raise ParseError(tail.offset, f"unexpected {tail.text!r} after expression",
                             ["end of formula"])
    except ParseError as err:
        # report offsets in the original string, '=' included
        raise ParseError(min(err.offset + 1, len(formula_text)),
                         err.message, err.expected) from None
    return ast


# --- Canonical printer -----------------------------------------------------

def _print_number(value: float) -> str:
    if value == int(value) and abs(value) < 1e16:
        return str(int(value))
    return repr(value)


def _print_ref(ref: RefExpr) -> str:
    sheet = f"{ref.sheet}!" if ref.sheet else ""
    return "%s%s%s%s%d" % (sheet,
                           "$" if ref.col_abs else "", col_letters(ref.col),
                           "$" if ref.row_abs else "", ref.row + 1)


def _print_node(node: FormulaAst) -> tuple:
    """Returns (text, precedence) so parents can decide on parentheses."""
    if isinstance(node, NumberLit):
        return _print_number(node.value) + ("%" if node.percent else ""), _ATOM_PREC
    if isinstance(node, TextLit):
        return '"' + node.value.replace('"', '""') + '"', _ATOM_PREC
    if isinstance(node, BoolLit):
        return ("TRUE" if node.value else "FALSE"), _ATOM_PREC
    if isinstance(node, ErrorLit):
        return ERROR_TEXT[node.kind], _ATOM_PREC
    if isinstance(node, RefExpr):
        return _print_ref(node), _ATOM_PREC
    if isinstance(node, RangeExpr):
        return _print_ref(node.start) + ":" + _print_ref(node.end), _ATOM_PREC
    if isinstance(node, NameRef):
        return node.name, _ATOM_PREC
    if isinstance(node, FuncCall):
        args = ";".join(_print_node(a)[0] for a in node.args)
        return f"{node.name}({args})", _ATOM_PREC
    if isinstance(node, Unary):
        text, prec = _print_node(node.expr)
        if prec < _UNARY_PREC:
            text = f"({text})"
        return node.op + text, _UNARY_PREC
    if isinstance(node, Binary):
        prec = _BINARY_PREC[node.op]
        left, lp = _print_node(node.lhs)
        right, rp = _print_node(node.rhs)
        if node.op == "^":
            if lp <= prec:
                left = f"({left})"
            if rp < prec:
                right = f"({right})"
        else:
            # comparisons are non-associative, so an equal-precedence child
            # needs parentheses on the left as well or it would not re-parse
            if lp < prec or (lp == prec and node.op in COMPARISONS):
                left = f"({left})"
            if rp <= prec:
                right = f"({right})"
        return left + node.op + right, prec
    raise TypeError(f"not a formula node: {node!r}")


def print_formula(ast: FormulaAst) -> str:
    return "=" + _print_node(ast)[0]


# --- Shape (R1C1-style) ----------------------------------------------------

def _shape_axis(letter: str, value: int, absolute: bool, origin: int) -> str:
    if absolute:
        return "%s%d" % (letter, value + 1)
    delta = value - origin
    return letter if delta == 0 else "%s[%d]" % (letter, delta)


def _shape_ref(ref: RefExpr, at: CellAddr) -> str:
    sheet = f"{ref.sheet}!" if ref.sheet else ""
    return (sheet + _shape_axis("R", ref.row, ref.row_abs, at.row)
            + _shape_axis("C", ref.col, ref.col_abs, at.col))


def print_shape(ast: FormulaAst, at: CellAddr) -> str:
    """Position-independent spelling: relative refs as offsets from `at`.

    Two copied formulas are "the same formula" exactly when their shapes
    match, which is how the suite checks that one formula fills a block.
    """
    def walk(node: FormulaAst) -> str:
        if isinstance(node, RefExpr):
            return _shape_ref(node, at)
        if isinstance(node, RangeExpr):
            return _shape_ref(node.start, at) + ":" + _shape_ref(node.end, at)
        if isinstance(node, FuncCall):
            return f"{node.name}({';'.join(walk(a) for a in node.args)})"
        if isinstance(node, Unary):
            return node.op + "(" + walk(node.expr) + ")"
        if isinstance(node, Binary):
            return "(" + walk(node.lhs) + node.op + walk(node.rhs) + ")"
        return _print_node(node)[0]

    return "=" + walk(ast)


# --- Precedents ------------------------------------------------------------

def _ref_addr(ref: RefExpr, at: CellAddr, resolve_sheet) -> Optional[CellAddr]:
    if ref.sheet is None:
        sheet = at.sheet
    else:
        sheet = resolve_sheet(ref.sheet) if resolve_sheet else None
        if sheet is None:
            return None
    return CellAddr(sheet, ref.row, ref.col)


def iter_ref_addrs(ast: FormulaAst, at: CellAddr,
                   resolve_sheet=None, names: dict | None = None):
    """Yield the cells a formula reads, in syntactic (left-to-right) order.

    Ranges expand row-major; names resolve through the table. Unknown
    sheets and names contribute nothing; evaluation will surface
    #REF!/#NAME? for them. Duplicates are yielded as written.
    """
    if isinstance(ast, RefExpr):
        addr = _ref_addr(ast, at, resolve_sheet)
        if addr is not None:
            yield addr
    elif isinstance(ast, RangeExpr):
        start = _ref_addr(ast.start, at, resolve_sheet)
        if start is not None:
            yield from CellRange(start,
                                 CellAddr(start.sheet, ast.end.row, ast.end.col))
    elif isinstance(ast, NameRef):
        target = (names or {}).get(ast.name)
        if isinstance(target, CellAddr):
            yield target
        elif isinstance(target, CellRange):
            yield from target
    elif isinstance(ast, FuncCall):
        for arg in ast.args:
            yield from iter_ref_addrs(arg, at, resolve_sheet, names)
    elif isinstance(ast, Unary):
        yield from iter_ref_addrs(ast.expr, at, resolve_sheet, names)
    elif isinstance(ast, Binary):
        yield from iter_ref_addrs(ast.lhs, at, resolve_sheet, names)
        yield from iter_ref_addrs(ast.rhs, at, resolve_sheet, names)


def precedents(ast: FormulaAst, at: CellAddr,
               resolve_sheet=None, names: dict | None = None) -> set:
    """Every cell the formula reads, as a set (see iter_ref_addrs)."""
    return set(iter_ref_addrs(ast, at, resolve_sheet, names))
