#!/usr/bin/env python3
"""Recalculation walk-through: a pre/post score table.

Four percentages go in, two formula columns derive the raw gain and the
relative gain, and a single edit ripples through exactly the cells that
depend on it. Run from the repository root:

    python3 scripts/demo_recalc.py
"""

from gridbook.addresses import parse_addr, render_addr
from gridbook.workbook import Workbook

COLS = "ABCDE"
ROWS = (1, 2, 3)


def show(wb, title):
    print(f"\n{title}")
    for r in ROWS:
        cells = [f"{wb.get_display(parse_addr(f'{c}{r}')):>10}" for c in COLS]
        print(f"  {r} |" + "|".join(cells))
    print("      " + "".join(f"{c:>11}" for c in COLS))


def main():
    wb = Workbook()
    entries = {
        "A2": "control", "A3": "coached",
        "B1": "pre", "C1": "post", "D1": "gain", "E1": "rel gain",
        "B2": "33%", "C2": "70%", "B3": "63%", "C3": "86%",
        "D2": "=C2-B2", "D3": "=C3-B3",
        "E2": "=(C2-B2)/(1-B2)", "E3": "=(C3-B3)/(1-B3)",
    }
    for a, text in entries.items():
        wb.set_entry(parse_addr(a), text)

    show(wb, "after entry — note the derived columns picked up the "
             "percent format from their inputs:")

    print("\nedit: control post-test corrected from 70% to 75%")
    changed = wb.set_entry(parse_addr("C2"), "75%")
    names = sorted(render_addr(a) for a in changed)
    print(f"cells recomputed & changed: {', '.join(names)}")

    show(wb, "after the edit — only the control row's derived cells moved:")

    print("\nformulas stay formulas (what you typed is what is stored):")
    for a in ("D2", "E2"):
        print(f"  {a}: {wb.get_entry(parse_addr(a))}")


if __name__ == "__main__":
    main()
