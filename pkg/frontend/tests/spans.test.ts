import { describe, expect, it } from "vitest";

import { byteToChar, highlightHtml, spanToEditor } from "../src/spans.js";

describe("byteToChar", () => {
  it("is the identity on ASCII", () => {
    expect(byteToChar("hello", 3)).toBe(3);
  });

  it("accounts for multi-byte characters", () => {
    // 'é' is two bytes in UTF-8
    expect(byteToChar("é x", 2)).toBe(1);
    expect(byteToChar("é x", 4)).toBe(3);
  });

  it("clamps past the end", () => {
    expect(byteToChar("ab", 99)).toBe(2);
  });
});

describe("spanToEditor", () => {
  const sets = "sets:\n  $N = (1..9)";
  const source = "formulas:\nP and\n";

  it("maps spans in the sets prefix to the sets editor", () => {
    const r = spanToEditor(sets, source, [8, 10]);
    expect(r).toEqual({ editor: "sets", from: 8, to: 10 });
  });

  it("maps spans after the prefix to the formulas editor", () => {
    const prefix = sets.length + 1;
    const r = spanToEditor(sets, source, [prefix + 10, prefix + 13]);
    expect(r).toEqual({ editor: "formulas", from: 10, to: 13 });
  });

  it("maps everything to formulas when the sets tab is empty", () => {
    const r = spanToEditor("", "P and", [2, 5]);
    expect(r).toEqual({ editor: "formulas", from: 2, to: 5 });
  });
});

describe("highlightHtml", () => {
  it("wraps ranges in mark tags and escapes the rest", () => {
    expect(highlightHtml("a < b", [[0, 1]])).toBe("<mark>a</mark> &lt; b\n");
  });

  it("handles multiple and overlapping ranges", () => {
    const html = highlightHtml("abcdef", [
      [0, 2],
      [1, 3], // overlaps the first; skipped
      [4, 6],
    ]);
    expect(html).toBe("<mark>ab</mark>cd<mark>ef</mark>\n");
  });

  it("ignores empty or out-of-bounds ranges", () => {
    expect(highlightHtml("abc", [[2, 2], [5, 9]])).toBe("abc\n");
  });
});
