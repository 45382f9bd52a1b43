import { describe, expect, it } from "vitest";

import { diffCount, diffSegments, symmetricDiffTokens, tokenize } from "../src/diff.js";

describe("tokenize", () => {
  it("lowercases and splits on non-alphanumerics", () => {
    expect(tokenize("Acme TurboWidget-2000, v2")).toEqual(
      ["acme", "turbowidget", "2000", "v2"]);
  });

  it("handles empty and missing values", () => {
    expect(tokenize("")).toEqual([]);
    expect(tokenize(null)).toEqual([]);
    expect(tokenize("---")).toEqual([]);
  });
});

describe("diffSegments", () => {
  it("identical strings highlight nothing", () => {
    const segs = diffSegments("acme widget 2000", "acme widget 2000");
    expect(segs.every(s => !s.diff)).toBe(true);
    expect(segs.map(s => s.text).join("")).toBe("acme widget 2000");
  });

  it("one differing token is highlighted on both sides", () => {
    const a = "acme widget red";
    const b = "acme widget blue";
    const leftDiffs = diffSegments(a, b).filter(s => s.diff).map(s => s.text);
    const rightDiffs = diffSegments(b, a).filter(s => s.diff).map(s => s.text);
    expect(leftDiffs).toEqual(["red"]);
    expect(rightDiffs).toEqual(["blue"]);
  });

  it("matching is case-insensitive but display is verbatim", () => {
    const segs = diffSegments("Acme WIDGET", "acme widget extra");
    expect(segs.filter(s => s.diff)).toEqual([]);
    expect(segs.map(s => s.text).join("")).toBe("Acme WIDGET");
  });

  it("a side missing entirely yields no segments", () => {
    expect(diffSegments(null, "anything")).toEqual([]);
    expect(diffCount("a b c", null)).toBe(3);
  });

  it("repeated tokens highlight every occurrence", () => {
    const segs = diffSegments("foo bar foo", "bar");
    expect(segs.filter(s => s.diff).map(s => s.text)).toEqual(["foo", "foo"]);
  });
});

describe("symmetricDiffTokens", () => {
  it("matches the engine's Diff(t) semantics", () => {
    expect(symmetricDiffTokens("a b c", "b c d")).toEqual(new Set(["a", "d"]));
    expect(symmetricDiffTokens("same same", "same")).toEqual(new Set());
  });
});
