/** Verbatim wire captures from a live engine session (stdio transport,
 * default workbook). Nothing here was typed by hand: each response is the
 * exact JSON the engine produced for the command above it. If the engine's
 * wire format changes these fixtures go stale together with the protocol —
 * re-capture, don't edit.
 */

import type { Response } from "../src/protocol.js";

const PLAIN = { color: "", bold: false };

/** SetEntry M2 "10" into the anchored multiplication table:
 * the four row-2 products are the complete dependent set. */
export const M2_EDIT_RESPONSE: Response = {
  id: "edit-m2",
  ok: true,
  revision: 11,
  changes: [
    { addr: "M2", sheet: "Sheet1", display: "10", machine: "10", style: PLAIN },
    { addr: "N2", sheet: "Sheet1", display: "60", machine: "60", style: PLAIN },
    { addr: "O2", sheet: "Sheet1", display: "90", machine: "90", style: PLAIN },
    { addr: "P2", sheet: "Sheet1", display: "80", machine: "80", style: PLAIN },
    { addr: "Q2", sheet: "Sheet1", display: "20", machine: "20", style: PLAIN },
  ],
};

/** SetEntry G2 "8:20". */
export const G2_RESPONSE: Response = {
  id: "g2",
  ok: true,
  revision: 12,
  changes: [
    {
      addr: "G2",
      sheet: "Sheet1",
      display: "8:20",
      machine: "0.3472222222222222",
      style: PLAIN,
    },
  ],
};

/** SetEntry G3 "8:30". */
export const G3_RESPONSE: Response = {
  id: "g3",
  ok: true,
  revision: 13,
  changes: [
    {
      addr: "G3",
      sheet: "Sheet1",
      display: "8:30",
      machine: "0.3541666666666667",
      style: PLAIN,
    },
  ],
};

/** Fill seed G2:G3 target G2:G5 — the engine continued the series. */
export const FILL_RESPONSE: Response = {
  id: "fill",
  ok: true,
  revision: 14,
  changes: [
    {
      addr: "G4",
      sheet: "Sheet1",
      display: "8:40",
      machine: "0.3611111111111111",
      style: PLAIN,
    },
    {
      addr: "G5",
      sheet: "Sheet1",
      display: "8:50",
      machine: "0.3680555555555556",
      style: PLAIN,
    },
  ],
  payload: {
    rules: [{ lane: "G", kind: "TimeStep", step: 0.006944444444444475 }],
  },
};
