/** Pure HTML builders: view-model in, markup string out.
 *
 * No DOM access here — the browser glue assigns the result to innerHTML.
 * Keeping these as string functions makes every pixel-level decision
 * testable in a plain test runner.
 */

import { colLetters, contains, renderAddr, type Rect } from "./a1.js";
import type { GridViewModel } from "./viewmodel.js";

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

export function gridHtml(vm: GridViewModel, window: Rect): string {
  const rows: string[] = [];
  const cols: number[] = [];
  for (let c = window.start.col; c <= window.end.col; c++) {
    if (!vm.hiddenCols.has(colLetters(c))) {
      cols.push(c);
    }
  }

  const head = cols
    .map((c) => `<th scope="col">${colLetters(c)}</th>`)
    .join("");
  rows.push(`<tr><th class="corner"></th>${head}</tr>`);

  for (let r = window.start.row; r <= window.end.row; r++) {
    if (vm.hiddenRows.has(r + 1)) {
      continue;
    }
    const cells: string[] = [`<th scope="row">${r + 1}</th>`];
    for (const c of cols) {
      const coord = { col: c, row: r };
      const addr = renderAddr(coord);
      const view = vm.cell(addr);
      const classes: string[] = ["cell"];
      if (view.style.bold) {
        classes.push("bold");
      }
      if (contains(vm.selection, coord)) {
        classes.push("selected");
      }
      const color = view.style.color
        ? ` style="color:${escapeHtml(view.style.color)}"`
        : "";
      cells.push(
        `<td class="${classes.join(" ")}" data-addr="${addr}"${color}>` +
          `${escapeHtml(view.display)}</td>`,
      );
    }
    rows.push(`<tr>${cells.join("")}</tr>`);
  }
  return `<table class="grid">${rows.join("")}</table>`;
}

export function formulaBarHtml(vm: GridViewModel): string {
  const addr = vm.cursorAddr;
  const entry = vm.entry(addr);
  return (
    `<span class="addr">${addr}</span>` +
    `<input id="entry" type="text" value="${escapeHtml(entry)}" ` +
    `spellcheck="false" autocomplete="off">`
  );
}

export function explainHtml(trace: string): string {
  return `<pre class="trace">${escapeHtml(trace)}</pre>`;
}

export function statusHtml(vm: GridViewModel): string {
  const err = vm.lastError;
  if (err) {
    return (
      `<span class="error">${escapeHtml(err.code)}: ` +
      `${escapeHtml(err.message)}</span>`
    );
  }
  const rules = vm.lastFillRules
    .map((r) => `${r.lane}: ${r.kind}`)
    .join(", ");
  const fill = rules ? ` — fill [${escapeHtml(rules)}]` : "";
  return `<span>rev ${vm.revision}${fill}</span>`;
}

/** Chart SVG passes through untouched: the engine rendered it already. */
export function chartPanelHtml(
  svg: string,
  lint: Array<{ rule: string; message: string }>,
): string {
  const findings = lint.length
    ? `<ul class="lint">${lint
        .map((f) => `<li><b>${escapeHtml(f.rule)}</b> ${escapeHtml(f.message)}</li>`)
        .join("")}</ul>`
    : `<p class="lint-clean">lint: clean</p>`;
  return `<div class="chart">${svg}</div>${findings}`;
}
