import { afterEach, describe, expect, it, vi } from "vitest";

import { scalarToUtf16, segmentByScalarRange } from "../src/offsets.js";

const CLEF = "\u{1D11E}"; // musical symbol, needs a surrogate pair in UTF-16

afterEach(() => {
  vi.restoreAllMocks();
});

describe("scalarToUtf16", () => {
  it("is the identity on BMP-only text", () => {
    const text = "今天蓝瘦香菇了";
    for (let i = 0; i <= text.length; i++) {
      expect(scalarToUtf16(text, i)).toBe(i);
    }
  });

  it("accounts for surrogate pairs", () => {
    const text = `${CLEF}蓝瘦`;
    expect(text.length).toBe(4); // UTF-16 units
    expect(scalarToUtf16(text, 0)).toBe(0);
    expect(scalarToUtf16(text, 1)).toBe(2);
    expect(scalarToUtf16(text, 3)).toBe(4);
  });

  it("returns -1 beyond the end", () => {
    expect(scalarToUtf16("蓝", 2)).toBe(-1);
    expect(scalarToUtf16("蓝", -1)).toBe(-1);
  });
});

describe("segmentByScalarRange", () => {
  it("splits a 7-char sentence at offsets 2..6 into a 4-char highlight", () => {
    const segments = segmentByScalarRange("今天蓝瘦香菇了", 2, 6);
    expect(segments).toEqual([
      { text: "今天", highlighted: false },
      { text: "蓝瘦香菇", highlighted: true },
      { text: "了", highlighted: false },
    ]);
    expect([...segments[1].text].length).toBe(4);
  });

  it("highlights the whole message at (0, length)", () => {
    const segments = segmentByScalarRange("蓝瘦香菇", 0, 4);
    expect(segments).toEqual([{ text: "蓝瘦香菇", highlighted: true }]);
  });

  it("maps scalar offsets correctly past a surrogate pair", () => {
    // scalar span (3,7) on a clef-prefixed sentence must select the pun,
    // not be shifted by the two-unit clef character
    const segments = segmentByScalarRange(`${CLEF}今天蓝瘦香菇了`, 3, 7);
    const highlighted = segments.filter((s) => s.highlighted);
    expect(highlighted).toHaveLength(1);
    expect(highlighted[0].text).toBe("蓝瘦香菇");
  });

  it("renders unhighlighted with a console warning when out of range", () => {
    const warn = vi.spyOn(console, "warn").mockImplementation(() => {});
    const segments = segmentByScalarRange("蓝瘦", 1, 9);
    expect(segments).toEqual([{ text: "蓝瘦", highlighted: false }]);
    expect(warn).toHaveBeenCalledOnce();
  });

  it("treats an empty range as out of range", () => {
    vi.spyOn(console, "warn").mockImplementation(() => {});
    expect(segmentByScalarRange("蓝瘦", 1, 1)).toEqual([
      { text: "蓝瘦", highlighted: false },
    ]);
  });
});
