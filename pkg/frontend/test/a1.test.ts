import { describe, expect, it } from "vitest";

import {
  cellsOf,
  colIndex,
  colLetters,
  contains,
  dragTarget,
  normalizeRect,
  parseAddr,
  parseRange,
  renderAddr,
  renderRange,
} from "../src/a1.js";

describe("addresses", () => {
  it("parses and renders round-trip", () => {
    for (const addr of ["A1", "Z9", "AA10", "G2", "XFD1048576"]) {
      expect(renderAddr(parseAddr(addr))).toBe(addr);
    }
  });

  it("column letters cross the Z/AA boundary correctly", () => {
    expect(colLetters(0)).toBe("A");
    expect(colLetters(25)).toBe("Z");
    expect(colLetters(26)).toBe("AA");
    expect(colLetters(51)).toBe("AZ");
    expect(colLetters(52)).toBe("BA");
    expect(colIndex("AA")).toBe(26);
    expect(colIndex("XFD")).toBe(16383);
  });

  it("rejects junk", () => {
    for (const bad of ["", "1A", "A", "A0X", "$A$1"]) {
      expect(() => parseAddr(bad)).toThrow();
    }
  });
});

describe("ranges", () => {
  it("normalizes corners", () => {
    const r = normalizeRect(parseAddr("C5"), parseAddr("A2"));
    expect(renderRange(r)).toBe("A2:C5");
  });

  it("single address is a 1x1 range", () => {
    expect(renderRange(parseRange("B3"))).toBe("B3:B3");
  });

  it("iterates row-major", () => {
    const got = [...cellsOf(parseRange("A1:B2"))].map(renderAddr);
    expect(got).toEqual(["A1", "B1", "A2", "B2"]);
  });

  it("contains is inclusive", () => {
    const r = parseRange("B2:C4");
    expect(contains(r, parseAddr("B2"))).toBe(true);
    expect(contains(r, parseAddr("C4"))).toBe(true);
    expect(contains(r, parseAddr("A2"))).toBe(false);
    expect(contains(r, parseAddr("C5"))).toBe(false);
  });
});

describe("dragTarget", () => {
  const seed = parseRange("G2:G3");

  it("extends downward keeping the seed corner", () => {
    expect(dragTarget(seed, parseAddr("G5"))).toEqual(parseRange("G2:G5"));
  });

  it("extends rightward", () => {
    expect(dragTarget(parseRange("B2:C2"), parseAddr("F2"))).toEqual(
      parseRange("B2:F2"),
    );
  });

  it("the dominant axis wins a diagonal drag", () => {
    expect(dragTarget(seed, parseAddr("H7"))).toEqual(parseRange("G2:G7"));
  });

  it("a drag inside the seed is a no-op", () => {
    expect(dragTarget(seed, parseAddr("G3"))).toBeNull();
    expect(dragTarget(seed, parseAddr("G2"))).toBeNull();
  });
});
