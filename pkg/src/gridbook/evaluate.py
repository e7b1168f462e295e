"""Formula evaluation against a workbook snapshot.

Everything here is total: bad input becomes an Error value, never an
exception. Errors propagate left to right through operators and function
arguments, with one exception: IF evaluates only the branch it takes, so
an error in the other branch stays invisible.

Coercions during evaluation (distinct from entry coercion):
  Empty -> 0 in arithmetic, "" in concatenation
  Boolean -> 1/0 in arithmetic
  Text in arithmetic -> #VALUE!  (no implicit parsing of "12" as 12)
Cross-type comparisons use the total order Number < Text < Boolean; text
compares case-insensitively. The same order keeps MIN/MAX well-defined
over mixed cells.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .addresses import CellAddr, CellRange
from .formats import machine_text, round_half_away
from .formula import (
    Binary,
    BoolLit,
    ErrorLit,
    FormulaAst,
    FuncCall,
    NameRef,
    NumberLit,
    RangeExpr,
    RefExpr,
    TextLit,
    Unary,
)
from .values import (
    DIV0,
    NAME_ERROR,
    REF_ERROR,
    VALUE_ERROR,
    ErrorValue,
    Value,
    is_error,
    is_number,
)


@dataclass(frozen=True)
class FunctionSig:
    name: str
    min_args: int
    max_args: Optional[int]  # None = unbounded
    reducing: bool


BUILTINS = {
    "SUM": FunctionSig("SUM", 1, None, True),
    "AVERAGE": FunctionSig("AVERAGE", 1, None, True),
    "MIN": FunctionSig("MIN", 1, None, True),
    "MAX": FunctionSig("MAX", 1, None, True),
    "COUNT": FunctionSig("COUNT", 1, None, True),
    "IF": FunctionSig("IF", 2, 3, False),
    "LEN": FunctionSig("LEN", 1, 1, False),
    "ROUND": FunctionSig("ROUND", 1, 2, False),
    "ABS": FunctionSig("ABS", 1, 1, False),
}


class _RangeValues:
    """A materialized range argument, row-major. Only reducers accept it."""

    __slots__ = ("values",)

    def __init__(self, values: list):
        self.values = values


class EvalContext:
    """What evaluation needs from the workbook. Tests can fake this."""

    def value_at(self, addr: CellAddr) -> Value:
        raise NotImplementedError

    def resolve_sheet(self, name: str) -> Optional[int]:
        raise NotImplementedError

    @property
    def names(self) -> dict:
        return {}


def _as_number(v: Value):
    if is_error(v):
        return v
    if v is None:
        return 0.0
    if isinstance(v, bool):
        return 1.0 if v else 0.0
    if isinstance(v, float):
        return v
    return VALUE_ERROR


def _as_text(v: Value):
    if is_error(v):
        return v
    return machine_text(v)


def _as_condition(v: Value):
    if is_error(v):
        return v
    if v is None:
        return False
    if isinstance(v, bool):
        return v
    if isinstance(v, float):
        return v != 0.0
    return VALUE_ERROR


def _rank(v: Value) -> int:
    if isinstance(v, bool):
        return 2
    if isinstance(v, str):
        return 1
    return 0


def _coerce_empty(v: Value, other: Value) -> Value:
    if v is not None:
        return v
    if isinstance(other, bool):
        return False
    if isinstance(other, str):
        return ""
    return 0.0


def compare(a: Value, b: Value) -> int:
    """Total order over non-error values: -1, 0 or 1."""
    if a is None and b is None:
        return 0
    a, b = _coerce_empty(a, b), _coerce_empty(b, a)
    ra, rb = _rank(a), _rank(b)
    if ra != rb:
        return -1 if ra < rb else 1
    if ra == 1:
        a, b = a.casefold(), b.casefold()
    elif ra == 2:
        a, b = int(a), int(b)
    return -1 if a < b else (1 if a > b else 0)


def _arith(op: str, left: float, right: float) -> Value:
    try:
        if op == "+":
            return left + right
        if op == "-":
            return left - right
        if op == "*":
            return left * right
        if op == "/":
            if right == 0.0:
                return DIV0
            return left / right
        if op == "^":
            if left == 0.0 and right == 0.0:
                return 1.0
            result = left ** right
            if isinstance(result, complex):
                return VALUE_ERROR
            return float(result)
    except ZeroDivisionError:
        return DIV0
    except (OverflowError, ValueError):
        return VALUE_ERROR
    raise AssertionError(op)


class Evaluator:
    def __init__(self, ctx: EvalContext, at: CellAddr,
                 bindings: dict | None = None):
        self.ctx = ctx
        self.at = at
        self.bindings = bindings or {}

    def run(self, ast: FormulaAst) -> Value:
        result = self._eval(ast)
        if isinstance(result, _RangeValues):
            return VALUE_ERROR  # a bare range is not a scalar
        return result

    # -- node dispatch

    def _eval(self, node: FormulaAst):
        if isinstance(node, NumberLit):
            return node.value / 100.0 if node.percent else node.value
        if isinstance(node, TextLit):
            return node.value
        if isinstance(node, BoolLit):
            return node.value
        if isinstance(node, ErrorLit):
            return ErrorValue(node.kind)
        if isinstance(node, RefExpr):
            addr = self._addr_of(node)
            if addr is None:
                return REF_ERROR
            return self.ctx.value_at(addr)
        if isinstance(node, RangeExpr):
            return self._range_values(node)
        if isinstance(node, NameRef):
            return self._name(node)
        if isinstance(node, Unary):
            return self._unary(node)
        if isinstance(node, Binary):
            return self._binary(node)
        if isinstance(node, FuncCall):
            return self._call(node)
        raise TypeError(f"not a formula node: {node!r}")

    def _scalar(self, node: FormulaAst):
        v = self._eval(node)
        if isinstance(v, _RangeValues):
            return VALUE_ERROR
        return v

    def _addr_of(self, ref: RefExpr) -> Optional[CellAddr]:
        if ref.sheet is None:
            return CellAddr(self.at.sheet, ref.row, ref.col)
        sheet = self.ctx.resolve_sheet(ref.sheet)
        if sheet is None:
            return None
        return CellAddr(sheet, ref.row, ref.col)

    def _range_values(self, node: RangeExpr):
        start = self._addr_of(node.start)
        if start is None:
            return REF_ERROR
        rng = CellRange(start, CellAddr(start.sheet, node.end.row, node.end.col))
        return _RangeValues([self.ctx.value_at(a) for a in rng])

    def _name(self, node: NameRef):
        if node.name in self.bindings:
            return self.bindings[node.name]
        target = self.ctx.names.get(node.name)
        if isinstance(target, CellAddr):
            return self.ctx.value_at(target)
        if isinstance(target, CellRange):
            return _RangeValues([self.ctx.value_at(a) for a in target])
        return NAME_ERROR

    def _unary(self, node: Unary):
        v = _as_number(self._scalar(node.expr))
        if is_error(v):
            return v
        return -v

    def _binary(self, node: Binary):
        op = node.op
        lv = self._scalar(node.lhs)
        if is_error(lv):
            return lv
        rv = self._scalar(node.rhs)
        if is_error(rv):
            return rv
        if op in ("+", "-", "*", "/", "^"):
            left = _as_number(lv)
            if is_error(left):
                return left
            right = _as_number(rv)
            if is_error(right):
                return right
            return _arith(op, left, right)
        if op == "&":
            return _as_text(lv) + _as_text(rv)
        # comparisons
        if op == "=":
            return compare(lv, rv) == 0
        if op == "<>":
            return compare(lv, rv) != 0
        c = compare(lv, rv)
        return {"<": c < 0, "<=": c <= 0, ">": c > 0, ">=": c >= 0}[op]

    # -- functions

    def _call(self, node: FuncCall):
        sig = BUILTINS.get(node.name)
        if sig is None:
            return NAME_ERROR
        n = len(node.args)
        if n < sig.min_args or (sig.max_args is not None and n > sig.max_args):
            return VALUE_ERROR
        if node.name == "IF":
            return self._if(node)
        if sig.reducing:
            return self._reduce(node)
        return self._scalar_fn(node)

    def _if(self, node: FuncCall):
        cond = _as_condition(self._scalar(node.args[0]))
        if is_error(cond):
            return cond
        if cond:
            return self._scalar(node.args[1])
        if len(node.args) == 3:
            return self._scalar(node.args[2])
        return False

    def _flatten(self, node: FuncCall):
        """All argument values in order; first error short-circuits."""
        out = []
        for arg in node.args:
            v = self._eval(arg)
            if isinstance(v, _RangeValues):
                for cell in v.values:
                    if is_error(cell):
                        return cell
                    out.append(cell)
            elif is_error(v):
                return v
            else:
                out.append(v)
        return out

    def _reduce(self, node: FuncCall):
        values = self._flatten(node)
        if is_error(values):
            return values
        numbers = [v for v in values if is_number(v)]
        name = node.name
        if name == "SUM":
            return float(sum(numbers))
        if name == "COUNT":
            return float(len(numbers))
        if name == "AVERAGE":
            if not numbers:
                return DIV0
            return sum(numbers) / len(numbers)
        # MIN/MAX range over every non-empty value via the total order
        present = [v for v in values if v is not None]
        if not present:
            return 0.0
        best = present[0]
        for v in present[1:]:
            c = compare(v, best)
            if (name == "MIN" and c < 0) or (name == "MAX" and c > 0):
                best = v
        return best

    def _scalar_fn(self, node: FuncCall):
        name = node.name
        if name == "LEN":
            v = self._scalar(node.args[0])
            if is_error(v):
                return v
            return float(len(machine_text(v)))
        if name == "ABS":
            v = _as_number(self._scalar(node.args[0]))
            if is_error(v):
                return v
            return abs(v)
        if name == "ROUND":
            v = _as_number(self._scalar(node.args[0]))
            if is_error(v):
                return v
            decimals = 0.0
            if len(node.args) == 2:
                decimals = _as_number(self._scalar(node.args[1]))
                if is_error(decimals):
                    return decimals
            return round_half_away(v, int(decimals))
        raise AssertionError(name)


def evaluate(ast: FormulaAst, ctx: EvalContext, at: CellAddr,
             bindings: dict | None = None) -> Value:
    return Evaluator(ctx, at, bindings).run(ast)
