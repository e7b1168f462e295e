/** DOM-free grid state: what each cell shows, straight off the wire.
 *
 * The view model owns no spreadsheet semantics. It sends commands, applies
 * the engine's change lists, and remembers exactly which cells repainted.
 * It never derives a display string, never parses one, and never does
 * arithmetic on cell contents — a fill, for example, is one Fill command
 * out and a list of engine-rendered strings back.
 */

import {
  cellsOf,
  dragTarget,
  normalizeRect,
  parseAddr,
  renderAddr,
  renderRange,
  type Coord,
  type Rect,
} from "./a1.js";
import {
  PLAIN_STYLE,
  sameStyle,
  type CellChange,
  type ChartPayload,
  type EngineError,
  type FillRule,
  type Response,
  type Snapshot,
  type StyleState,
  type Verb,
} from "./protocol.js";
import type { Transport } from "./transport.js";

export interface CellView {
  display: string;
  machine: string;
  entry: string;
  style: StyleState;
}

const EMPTY_CELL: CellView = {
  display: "",
  machine: "",
  entry: "",
  style: PLAIN_STYLE,
};

export type RepaintListener = (addrs: ReadonlySet<string>) => void;

export class GridViewModel {
  private readonly cells = new Map<string, CellView>();
  private readonly listeners: RepaintListener[] = [];

  revision = 0;
  selection: Rect = { start: { col: 0, row: 0 }, end: { col: 0, row: 0 } };
  hiddenRows = new Set<number>();
  hiddenCols = new Set<string>();
  lastRepaint: ReadonlySet<string> = new Set();
  lastError: EngineError | null = null;
  lastFillRules: FillRule[] = [];

  constructor(private readonly transport: Transport) {}

  // ------------------------------------------------------------ reading

  cell(addr: string): CellView {
    return this.cells.get(addr) ?? EMPTY_CELL;
  }

  display(addr: string): string {
    return this.cell(addr).display;
  }

  entry(addr: string): string {
    return this.cell(addr).entry;
  }

  get cursor(): Coord {
    return this.selection.start;
  }

  get cursorAddr(): string {
    return renderAddr(this.cursor);
  }

  onRepaint(fn: RepaintListener): void {
    this.listeners.push(fn);
  }

  // ---------------------------------------------------------- selection

  select(anchor: Coord, focus?: Coord): void {
    this.selection = normalizeRect(anchor, focus ?? anchor);
  }

  selectAddr(addr: string): void {
    this.select(parseAddr(addr));
  }

  // ----------------------------------------------------------- commands

  async dispatch(
    verb: Verb,
    params: Record<string, unknown>,
  ): Promise<Response> {
    const resp = await this.transport.send(verb, params);
    this.applyResponse(resp);
    return resp;
  }

  async setEntry(addr: string, text: string): Promise<Response> {
    const resp = await this.dispatch("SetEntry", { addr, text });
    if (resp.ok) {
      this.rememberEntry(addr, text);
    }
    return resp;
  }

  async copyBlock(src: string, dst: string): Promise<Response> {
    return this.dispatch("CopyBlock", { src, dst });
  }

  /**
   * Fill-handle drag: selection is the seed, `to` is where the pointer
   * ended. Geometry happens here; the series itself is engine work.
   */
  async fillDrag(to: Coord): Promise<Response | null> {
    const seed = this.selection;
    const target = dragTarget(seed, to);
    if (target === null) {
      return null;
    }
    const resp = await this.dispatch("Fill", {
      seed: renderRange(seed),
      target: renderRange(target),
    });
    if (resp.ok) {
      this.lastFillRules = (resp.payload?.rules as FillRule[]) ?? [];
      this.select(target.start, target.end);
    }
    return resp;
  }

  async setHidden(
    axis: "rows" | "cols",
    indices: Array<number | string>,
    hidden: boolean,
  ): Promise<Response> {
    const resp = await this.dispatch("SetHidden", { axis, indices, hidden });
    if (resp.ok) {
      for (const ix of indices) {
        const bucket =
          axis === "rows"
            ? this.hiddenRows
            : (this.hiddenCols as Set<unknown>);
        if (hidden) {
          (bucket as Set<unknown>).add(ix);
        } else {
          (bucket as Set<unknown>).delete(ix);
        }
      }
      this.notify(new Set());
    }
    return resp;
  }

  async explain(text: string, addr?: string): Promise<string> {
    const resp = await this.dispatch("Explain", {
      text,
      addr: addr ?? this.cursorAddr,
    });
    if (!resp.ok) {
      return `error ${resp.error?.code}: ${resp.error?.message}`;
    }
    return (resp.payload?.trace as string) ?? "";
  }

  async buildChart(spec: Record<string, unknown>): Promise<ChartPayload> {
    const resp = await this.dispatch("BuildChart", { spec });
    if (!resp.ok) {
      throw new Error(`${resp.error?.code}: ${resp.error?.message}`);
    }
    return resp.payload as unknown as ChartPayload;
  }

  /** Full-window refresh; the resync path after a reconnect. */
  async resync(window: string): Promise<Response> {
    const resp = await this.dispatch("SnapshotRequest", { window });
    if (resp.ok && resp.payload) {
      this.applySnapshot(resp.payload.snapshot as Snapshot, window);
    }
    return resp;
  }

  // ------------------------------------------------------ state updates

  applyResponse(resp: Response): ReadonlySet<string> {
    this.revision = resp.revision;
    this.lastError = resp.ok ? null : (resp.error ?? null);
    const repaint = new Set<string>();
    for (const change of resp.changes) {
      this.applyChange(change, repaint);
    }
    this.lastRepaint = repaint;
    this.notify(repaint);
    return repaint;
  }

  private applyChange(change: CellChange, repaint: Set<string>): void {
    const prev = this.cells.get(change.addr);
    this.cells.set(change.addr, {
      display: change.display,
      machine: change.machine,
      entry: prev?.entry ?? "",
      style: change.style,
    });
    repaint.add(change.addr);
  }

  private applySnapshot(snap: Snapshot, window: string): void {
    const repaint = new Set<string>();
    for (const coord of cellsOf(parseRangeSafe(window))) {
      const addr = renderAddr(coord);
      if (this.cells.delete(addr)) {
        repaint.add(addr);
      }
    }
    for (const cell of snap.cells) {
      this.cells.set(cell.addr, {
        display: cell.display,
        machine: cell.machine,
        entry: cell.entry,
        style: cell.style,
      });
      repaint.add(cell.addr);
    }
    this.hiddenRows = new Set(snap.hiddenRows);
    this.hiddenCols = new Set(snap.hiddenCols);
    this.revision = snap.revision;
    this.lastRepaint = repaint;
    this.notify(repaint);
  }

  private rememberEntry(addr: string, text: string): void {
    const prev = this.cells.get(addr);
    if (prev) {
      this.cells.set(addr, { ...prev, entry: text });
    } else {
      // entry accepted but nothing repainted (e.g. re-typing the same
      // value): keep the entry anyway so the formula bar stays honest
      this.cells.set(addr, { ...EMPTY_CELL, entry: text });
    }
  }

  private notify(repaint: ReadonlySet<string>): void {
    for (const fn of this.listeners) {
      fn(repaint);
    }
  }
}

function parseRangeSafe(window: string): Rect {
  const [a, b] = window.split(":");
  const start = parseAddr(a ?? "A1");
  return normalizeRect(start, b ? parseAddr(b) : start);
}

export function styleChanged(a: StyleState, b: StyleState): boolean {
  return !sameStyle(a, b);
}
