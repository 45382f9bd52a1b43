import { describe, expect, it } from "vitest";

import { PairView, ViewState } from "../src/controller.js";
import { diffSegments } from "../src/diff.js";
import { countHighlights, renderState } from "../src/render.js";

function pairView(leftName: string, rightName: string, remaining = 5): PairView {
  return {
    pairId: "a1|b1",
    leftId: "a1",
    rightId: "b1",
    rows: [{
      name: "name",
      left: diffSegments(leftName, rightName),
      right: diffSegments(rightName, leftName),
    }],
    machineLabel: "match",
    risk: 0.421,
    remainingBudget: remaining,
  };
}

function labeling(pair: PairView): ViewState {
  return { kind: "labeling", pair, metrics: null, notice: null };
}

describe("renderState: labeling", () => {
  it("identical records render zero highlights", () => {
    const html = renderState(labeling(pairView("acme widget", "acme widget")));
    expect(countHighlights(html)).toBe(0);
  });

  it("one differing token renders exactly one highlight per side", () => {
    const html = renderState(labeling(pairView("acme widget red", "acme widget blue")));
    expect(countHighlights(html)).toBe(2);
    expect(html).toContain('<mark class="diff">red</mark>');
    expect(html).toContain('<mark class="diff">blue</mark>');
  });

  it("shows machine label, risk and remaining budget", () => {
    const html = renderState(labeling(pairView("a", "a", 7)));
    expect(html).toContain("machine: match");
    expect(html).toContain("risk 0.421");
    expect(html).toContain("7 labels left");
    expect(html).toContain('data-action="match"');
    expect(html).toContain('data-action="unmatch"');
  });

  it("escapes record content", () => {
    const html = renderState(labeling(pairView("<script>alert(1)</script>",
                                               "<script>alert(1)</script>")));
    expect(html).not.toContain("<script>alert");
    expect(html).toContain("&lt;script&gt;alert(1)&lt;/script&gt;");
  });
});

describe("renderState: completion", () => {
  it("renders the completion screen with final counts", () => {
    const state: ViewState = {
      kind: "complete",
      metrics: { session_id: "s", status: "complete", consumed_budget: 3,
                 budget: 3, pickup: 2, precision: 0.9, recall: 0.8, f1: 0.847 },
      report: {},
    };
    const html = renderState(state);
    expect(html).toContain("Session complete");
    expect(html).toContain("3 of 3 labels used");
    expect(html).toContain("2 machine errors corrected");
    expect(html).toContain("F1 0.847");
    expect(html).toContain('data-action="report"');
  });
});
