"""Conditional formatting: predicate-driven styles over cell blocks.

Rules reuse the formula language — the reserved identifier `cell` binds to
each cell's computed value in turn, so LEN(cell)>6 is an ordinary boolean
expression, and there is no second mini-language to learn.

Rules are session objects; they restyle after every recalculation and are
not persisted with the workbook.
"""

from __future__ import annotations

from dataclasses import dataclass

from .addresses import CellRange, render_addr
from .evaluate import evaluate
from .formats import StyleState
from .formula import FormulaAst, ParseError, parse
from .values import is_error


@dataclass(frozen=True)
class CondRule:
    range: CellRange
    predicate: FormulaAst
    style: StyleState
    priority: int
    source: str = ""  # the predicate as typed, for reports


def make_rule(rng: CellRange, predicate_text: str, style: StyleState,
              priority: int) -> CondRule:
    """Parse a predicate like "LEN(cell)>6" into a rule. Raises ParseError."""
    ast = parse("=" + predicate_text)
    return CondRule(range=rng, predicate=ast, style=style,
                    priority=priority, source=predicate_text)


def _matches(wb, rule: CondRule, addr) -> bool:
    value = wb.value_at(addr)
    result = evaluate(rule.predicate, wb, addr, bindings={"CELL": value})
    if is_error(result):
        wb.diagnostics.append(
            f"cond rule {rule.source!r} at {render_addr(addr)}: "
            f"predicate errored, treated as false")
        return False
    if isinstance(result, bool):
        return result
    if isinstance(result, float):
        return result != 0.0
    return False


def apply_cond_rules(wb, rules: list) -> dict:
    """Winning style per cell: lowest priority number claims first.

    Pure function of computed values — applying twice without edits gives
    the same map. Cells no rule matches are absent.
    """
    winners: dict = {}
    for rule in sorted(rules, key=lambda r: r.priority):
        for addr in rule.range:
            if addr in winners:
                continue
            if _matches(wb, rule, addr):
                winners[addr] = rule.style
    return winners
