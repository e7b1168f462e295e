/** Wire types for the gridbook session protocol.
 *
 * One command per frame, one response per command, matched by `id`.
 * `changes` lists every cell whose display or style changed and nothing
 * else; `machine` is canonical dot-decimal text so no client ever has to
 * re-parse a localized display string.
 */

export type Verb =
  | "SetEntry"
  | "CopyBlock"
  | "Fill"
  | "SetFormat"
  | "AddCondRule"
  | "SetHidden"
  | "SetFilter"
  | "Import"
  | "BuildChart"
  | "Explain"
  | "Save"
  | "Load"
  | "SnapshotRequest";

export type CommandId = string | number | null;

export interface Command {
  id: CommandId;
  verb: Verb;
  params: Record<string, unknown>;
}

/** Cell style as it crosses the wire; no color is the empty string. */
export interface StyleState {
  color: string;
  bold: boolean;
}

export interface CellChange {
  addr: string;
  sheet: string;
  display: string;
  machine: string;
  style: StyleState;
}

export interface EngineError {
  code: string;
  message: string;
}

export interface Response {
  id: CommandId;
  ok: boolean;
  /** Monotonic; bumps exactly when observable workbook state changed. */
  revision: number;
  changes: CellChange[];
  payload?: Record<string, unknown>;
  error?: EngineError;
}

export interface SnapshotCell {
  addr: string;
  display: string;
  machine: string;
  entry: string;
  style: StyleState;
}

export interface Snapshot {
  revision: number;
  sheet: string;
  window: string;
  cells: SnapshotCell[];
  /** 1-based row numbers. */
  hiddenRows: number[];
  /** Column letters. */
  hiddenCols: string[];
  filter: unknown;
}

export interface FillRule {
  lane: string;
  kind: string;
  step?: number;
}

export interface AxisScale {
  min: number;
  max: number;
  tick: number;
}

export interface LintFinding {
  rule: string;
  message: string;
}

export interface ChartPayload {
  svg: string;
  scale?: AxisScale;
  lint: LintFinding[];
}

export const PLAIN_STYLE: StyleState = { color: "", bold: false };

export function sameStyle(a: StyleState, b: StyleState): boolean {
  return a.color === b.color && a.bold === b.bold;
}
