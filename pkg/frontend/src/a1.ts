/** A1 address geometry.
 *
 * Pure coordinate bookkeeping for windows, selections and drag targets.
 * Nothing in here touches cell *values* — what a cell shows is always the
 * engine's business.
 */

export interface Coord {
  /** 0-based column index (A = 0). */
  col: number;
  /** 0-based row index (row 1 = 0). */
  row: number;
}

const ADDR_RE = /^([A-Z]{1,3})([0-9]{1,7})$/;

export function colIndex(letters: string): number {
  let n = 0;
  for (const ch of letters) {
    n = n * 26 + (ch.charCodeAt(0) - 64);
  }
  return n - 1;
}

export function colLetters(index: number): string {
  let n = index + 1;
  let out = "";
  while (n > 0) {
    const rem = (n - 1) % 26;
    out = String.fromCharCode(65 + rem) + out;
    n = Math.floor((n - 1) / 26);
  }
  return out;
}

export function parseAddr(text: string): Coord {
  const m = ADDR_RE.exec(text.trim().toUpperCase());
  if (!m || m[1] === undefined || m[2] === undefined) {
    throw new Error(`not a cell address: ${JSON.stringify(text)}`);
  }
  return { col: colIndex(m[1]), row: parseInt(m[2], 10) - 1 };
}

export function renderAddr(c: Coord): string {
  return `${colLetters(c.col)}${c.row + 1}`;
}

export interface Rect {
  start: Coord;
  end: Coord;
}

export function parseRange(text: string): Rect {
  const parts = text.split(":");
  if (parts.length === 1 && parts[0] !== undefined) {
    const a = parseAddr(parts[0]);
    return { start: a, end: a };
  }
  if (parts.length !== 2 || parts[0] === undefined || parts[1] === undefined) {
    throw new Error(`not a range: ${JSON.stringify(text)}`);
  }
  return normalizeRect(parseAddr(parts[0]), parseAddr(parts[1]));
}

export function normalizeRect(a: Coord, b: Coord): Rect {
  return {
    start: { col: Math.min(a.col, b.col), row: Math.min(a.row, b.row) },
    end: { col: Math.max(a.col, b.col), row: Math.max(a.row, b.row) },
  };
}

export function renderRange(r: Rect): string {
  return `${renderAddr(r.start)}:${renderAddr(r.end)}`;
}

export function* cellsOf(r: Rect): Generator<Coord> {
  for (let row = r.start.row; row <= r.end.row; row++) {
    for (let col = r.start.col; col <= r.end.col; col++) {
      yield { col, row };
    }
  }
}

export function contains(r: Rect, c: Coord): boolean {
  return (
    r.start.col <= c.col &&
    c.col <= r.end.col &&
    r.start.row <= c.row &&
    c.row <= r.end.row
  );
}

/**
 * Where a fill-handle drag from `seed` to the pointer cell `to` lands.
 *
 * The target keeps the seed's top-left corner and extends along exactly
 * one axis (whichever the pointer moved along further); a drag that stays
 * inside the seed is a no-op (returns null). The caller sends the result
 * to the engine — deciding what the new cells *contain* is not done here.
 */
export function dragTarget(seed: Rect, to: Coord): Rect | null {
  const downward = Math.max(0, to.row - seed.end.row);
  const rightward = Math.max(0, to.col - seed.end.col);
  if (downward === 0 && rightward === 0) {
    return null;
  }
  if (downward >= rightward) {
    return {
      start: seed.start,
      end: { col: seed.end.col, row: to.row },
    };
  }
  return {
    start: seed.start,
    end: { col: to.col, row: seed.end.row },
  };
}
