import { describe, expect, it } from "vitest";

import { parseAddr } from "../src/a1.js";
import type { Response } from "../src/protocol.js";
import { GridViewModel } from "../src/viewmodel.js";
import {
  FILL_RESPONSE,
  G2_RESPONSE,
  G3_RESPONSE,
  M2_EDIT_RESPONSE,
} from "./fixtures.js";
import { MockServer, type ScriptStep } from "./mock.js";

const PLAIN = { color: "", bold: false };

function ok(
  revision: number,
  changes: Response["changes"] = [],
  payload?: Record<string, unknown>,
): Response {
  const resp: Response = { id: 1, ok: true, revision, changes };
  if (payload) {
    resp.payload = payload;
  }
  return resp;
}

describe("change-merge on edit", () => {
  it("repaints exactly the four dependent cells of M2 and adopts the engine revision", async () => {
    const server = new MockServer([
      {
        verb: "SetEntry",
        params: { addr: "M2", text: "10" },
        response: M2_EDIT_RESPONSE,
      },
    ]);
    const vm = new GridViewModel(server);

    const resp = await vm.setEntry("M2", "10");

    const dependentsRepainted = new Set(vm.lastRepaint);
    dependentsRepainted.delete("M2");
    expect(dependentsRepainted).toEqual(new Set(["N2", "O2", "P2", "Q2"]));
    expect(dependentsRepainted.size).toBe(4);
    expect(vm.lastRepaint.has("M2")).toBe(true);
    expect(vm.revision).toBe(resp.revision);
    expect(vm.revision).toBe(11);
    expect(vm.display("N2")).toBe("60");
    expect(vm.display("Q2")).toBe("20");
    expect(server.exhausted).toBe(true);
  });

  it("cells outside the change list keep their old face and do not repaint", async () => {
    const server = new MockServer([
      {
        verb: "SetEntry",
        response: ok(5, [
          { addr: "N3", sheet: "Sheet1", display: "42", machine: "42", style: PLAIN },
        ]),
      },
      { verb: "SetEntry", response: M2_EDIT_RESPONSE },
    ]);
    const vm = new GridViewModel(server);
    await vm.setEntry("N3", "42");
    await vm.setEntry("M2", "10");

    expect(vm.lastRepaint.has("N3")).toBe(false);
    expect(vm.display("N3")).toBe("42");
  });

  it("notifies repaint listeners with the changed address set", async () => {
    const server = new MockServer([
      { verb: "SetEntry", response: M2_EDIT_RESPONSE },
    ]);
    const vm = new GridViewModel(server);
    const seen: Array<ReadonlySet<string>> = [];
    vm.onRepaint((addrs) => seen.push(addrs));

    await vm.setEntry("M2", "10");

    expect(seen).toHaveLength(1);
    expect(seen[0]).toEqual(new Set(["M2", "N2", "O2", "P2", "Q2"]));
  });
});

describe("drag-fill", () => {
  async function seededVm(extraScript: ScriptStep[]) {
    const server = new MockServer([
      {
        verb: "SetEntry",
        params: { addr: "G2", text: "8:20" },
        response: G2_RESPONSE,
      },
      {
        verb: "SetEntry",
        params: { addr: "G3", text: "8:30" },
        response: G3_RESPONSE,
      },
      ...extraScript,
    ]);
    const vm = new GridViewModel(server);
    await vm.setEntry("G2", "8:20");
    await vm.setEntry("G3", "8:30");
    return { vm, server };
  }

  it("renders engine-supplied time strings with zero client-side arithmetic", async () => {
    const { vm, server } = await seededVm([
      {
        verb: "Fill",
        params: { seed: "G2:G3", target: "G2:G5" },
        response: FILL_RESPONSE,
      },
    ]);

    // the engine supplied the seed displays too: 8:20/8:30 came off the wire
    expect(vm.display("G2")).toBe("8:20");
    expect(vm.display("G3")).toBe("8:30");

    vm.select(parseAddr("G2"), parseAddr("G3"));
    const resp = await vm.fillDrag(parseAddr("G5"));

    expect(resp?.ok).toBe(true);
    expect(vm.display("G4")).toBe("8:40");
    expect(vm.display("G5")).toBe("8:50");
    expect(vm.lastFillRules).toEqual([
      { lane: "G", kind: "TimeStep", step: 0.006944444444444475 },
    ]);
    expect(server.exhausted).toBe(true);
  });

  it("paints whatever the engine answers, verbatim — the client computes nothing", async () => {
    // sentinel continuation no arithmetic could produce: if the client
    // derived the series itself this test would show 8:40, not the marker
    const { vm } = await seededVm([
      {
        verb: "Fill",
        response: ok(99, [
          {
            addr: "G4",
            sheet: "Sheet1",
            display: "engine-said-so",
            machine: "0",
            style: PLAIN,
          },
        ]),
      },
    ]);
    vm.select(parseAddr("G2"), parseAddr("G3"));
    await vm.fillDrag(parseAddr("G4"));
    expect(vm.display("G4")).toBe("engine-said-so");
  });

  it("extends the selection to the filled target", async () => {
    const { vm } = await seededVm([
      { verb: "Fill", response: FILL_RESPONSE },
    ]);
    vm.select(parseAddr("G2"), parseAddr("G3"));
    await vm.fillDrag(parseAddr("G5"));
    expect(vm.selection).toEqual({
      start: { col: 6, row: 1 },
      end: { col: 6, row: 4 },
    });
  });

  it("a drag that stays inside the seed sends nothing", async () => {
    const { vm, server } = await seededVm([]);
    vm.select(parseAddr("G2"), parseAddr("G3"));
    const resp = await vm.fillDrag(parseAddr("G3"));
    expect(resp).toBeNull();
    expect(server.sent).toHaveLength(2); // only the two seed entries
  });
});

describe("snapshot resync", () => {
  it("replaces the window contents and adopts hidden state", async () => {
    const server = new MockServer([
      { verb: "SetEntry", response: G2_RESPONSE },
      {
        verb: "SnapshotRequest",
        params: { window: "A1:H10" },
        response: ok(20, [], {
          snapshot: {
            revision: 20,
            sheet: "Sheet1",
            window: "A1:H10",
            cells: [
              {
                addr: "A1",
                display: "37%",
                machine: "0.37",
                entry: "=B1-C1",
                style: PLAIN,
              },
            ],
            hiddenRows: [5],
            hiddenCols: ["C"],
            filter: null,
          },
        }),
      },
    ]);
    const vm = new GridViewModel(server);
    await vm.setEntry("G2", "8:20");

    await vm.resync("A1:H10");

    expect(vm.display("A1")).toBe("37%");
    expect(vm.entry("A1")).toBe("=B1-C1");
    expect(vm.display("G2")).toBe(""); // stale cell cleared by the resync
    expect(vm.hiddenRows.has(5)).toBe(true);
    expect(vm.hiddenCols.has("C")).toBe(true);
    expect(vm.revision).toBe(20);
  });
});

describe("errors and payload verbs", () => {
  it("keeps the error for the status line and adopts the revision", async () => {
    const server = new MockServer([
      {
        verb: "SetEntry",
        response: {
          id: 1,
          ok: false,
          revision: 7,
          changes: [],
          error: { code: "BadAddress", message: "no such cell 'ZZZZZ1'" },
        },
      },
    ]);
    const vm = new GridViewModel(server);
    const resp = await vm.setEntry("A1", "x");
    expect(resp.ok).toBe(false);
    expect(vm.lastError?.code).toBe("BadAddress");
    expect(vm.revision).toBe(7);
    expect(vm.lastRepaint.size).toBe(0);
  });

  it("explain returns the engine trace untouched", async () => {
    const trace =
      "TRIED rule 1 (number): not a plain number\n" +
      "FIRED rule 3 (date): d/m with today's year -> 12 March 2004";
    const server = new MockServer([
      { verb: "Explain", response: ok(0, [], { trace }) },
    ]);
    const vm = new GridViewModel(server);
    expect(await vm.explain("12/3")).toBe(trace);
  });

  it("chart svg passes through exactly as built by the engine", async () => {
    const svg = '<svg xmlns="http://www.w3.org/2000/svg"><rect/></svg>';
    const server = new MockServer([
      {
        verb: "BuildChart",
        response: ok(0, [], { svg, lint: [], points: 4 }),
      },
    ]);
    const vm = new GridViewModel(server);
    const payload = await vm.buildChart({ kind: "bar", series: [] });
    expect(payload.svg).toBe(svg);
  });
});
