#!/usr/bin/env python3
"""Chart pipeline walk-through: import a table, render SVGs, read the lint.

Imports a small quarterly dataset, renders a bar chart and a line chart to
SVG files, then deliberately builds an unreadable pie so the sobriety lint
has something to say. Run from the repository root:

    python3 scripts/demo_charts.py [out-dir]
"""

import sys
from pathlib import Path

from gridbook.charts import build_chart, lint_chart, render_svg, spec_from_json
from gridbook.tableops import ImportSpec, import_delimited
from gridbook.workbook import Workbook
from gridbook.addresses import parse_addr

QUARTERS = """produit;T1;T2;T3;T4
nord;30;45;40;10
sud;42;63;56;14
est;54;81;72;18
ouest;18;27;24;6
"""


def report(tag, data):
    findings = lint_chart(data).findings
    if not findings:
        print(f"  {tag}: lint clean")
    for f in findings:
        print(f"  {tag}: [{f.rule}] {f.message}")


def main():
    out_dir = Path(sys.argv[1]) if len(sys.argv) > 1 else Path("out")
    out_dir.mkdir(parents=True, exist_ok=True)

    wb = Workbook()
    import_delimited(wb, QUARTERS, ImportSpec(header_row=True))

    bar_spec = spec_from_json({
        "kind": "bar", "title": "ventes T1 par region",
        "categories": "A2:A5",
        "series": [{"name": "T1", "range": "B2:B5"}],
    })
    bar = build_chart(wb, bar_spec)
    (out_dir / "bar.svg").write_text(render_svg(bar), encoding="utf-8")
    report("bar", bar)

    line_spec = spec_from_json({
        "kind": "line", "title": "nord vs sud sur l'annee",
        "series": [{"name": "nord", "range": "B2:E2"},
                   {"name": "sud", "range": "B3:E3"}],
    })
    line = build_chart(wb, line_spec)
    (out_dir / "line.svg").write_text(render_svg(line), encoding="utf-8")
    report("line", line)

    # twelve monthly slices: the pie renders, and the lint objects
    for i, v in enumerate([31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31]):
        wb.set_entry(parse_addr(f"H{i + 1}"), str(v))
    pie_spec = spec_from_json({
        "kind": "pie", "title": "jours par mois",
        "series": [{"name": "jours", "range": "H1:H12"}],
    })
    pie = build_chart(wb, pie_spec)
    (out_dir / "pie.svg").write_text(render_svg(pie), encoding="utf-8")
    report("pie", pie)

    print(f"\nwrote {out_dir}/bar.svg, {out_dir}/line.svg, {out_dir}/pie.svg")


if __name__ == "__main__":
    main()
