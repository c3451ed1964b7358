import { describe, expect, it } from "vitest";

import { linearScale, logScale, niceTicks } from "../src/scale.js";

describe("niceTicks", () => {
  it("produces round steps covering the span", () => {
    const ticks = niceTicks(0, 100, 5);
    expect(ticks).toEqual([0, 20, 40, 60, 80, 100]);
  });

  it("collapses a degenerate span to one tick", () => {
    expect(niceTicks(5, 5)).toEqual([5]);
  });

  it("never exceeds the upper bound", () => {
    for (const [lo, hi] of [
      [0, 7],
      [13, 9200],
      [0.02, 0.9],
    ] as const) {
      const ticks = niceTicks(lo, hi);
      expect(Math.max(...ticks)).toBeLessThanOrEqual(hi * (1 + 1e-9));
      expect(Math.min(...ticks)).toBeGreaterThanOrEqual(lo - 1e-9);
    }
  });
});

describe("linearScale", () => {
  it("maps the domain endpoints onto the range", () => {
    const s = linearScale([0, 10], [100, 500]);
    expect(s(0)).toBe(100);
    expect(s(10)).toBe(500);
    expect(s(5)).toBe(300);
  });

  it("supports inverted ranges (SVG y axis)", () => {
    const s = linearScale([0, 1], [320, 20]);
    expect(s(0)).toBe(320);
    expect(s(1)).toBe(20);
  });
});

describe("logScale", () => {
  it("pads the domain to whole decades and spaces them evenly", () => {
    const s = logScale([30, 4000], [0, 300]);
    expect(s.domain).toEqual([10, 10000]);
    expect(s.ticks).toEqual([10, 100, 1000, 10000]);
    expect(s(10)).toBeCloseTo(0, 9);
    expect(s(100)).toBeCloseTo(100, 9);
    expect(s(10000)).toBeCloseTo(300, 9);
  });
});
