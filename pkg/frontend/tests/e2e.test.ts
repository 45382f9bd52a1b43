/**
 * End-to-end flow against the real Python labeling service: start a session
 * with a 3-label budget, label pairs through the controller, and check budget
 * decrement, queue re-ranking, duplicate suppression and the completion
 * screen.
 */

import { spawn, spawnSync, ChildProcess } from "node:child_process";
import { mkdtempSync, readFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { LabelingApi } from "../src/api.js";
import { LabelingController, ViewState } from "../src/controller.js";
import { renderState } from "../src/render.js";

const PORT = 8000 + (process.pid % 1000);
const BASE = `http://127.0.0.1:${PORT}`;

let server: ChildProcess;
let storageDir: string;
let datasetDir: string;

async function waitForServer(): Promise<void> {
  for (let i = 0; i < 100; i++) {
    try {
      const resp = await fetch(`${BASE}/sessions/nonexistent/next`);
      if (resp.status === 404) return;
    } catch {
      /* not up yet */
    }
    await new Promise(r => setTimeout(r, 200));
  }
  throw new Error("labeling service did not come up");
}

beforeAll(async () => {
  const work = mkdtempSync(join(tmpdir(), "riskloop-ui-"));
  storageDir = join(work, "sessions");
  datasetDir = join(work, "dataset");
  const synth = spawnSync("python3", ["-m", "riskloop.cli", "synth",
    "--seed", "4", "--entities", "30", "--out", datasetDir]);
  if (synth.status !== 0) {
    throw new Error(`synth failed: ${synth.stderr}`);
  }
  server = spawn("python3", ["-m", "riskloop.cli", "serve",
    "--storage", storageDir, "--port", String(PORT)], { stdio: "ignore" });
  await waitForServer();
}, 60_000);

afterAll(() => {
  server?.kill();
});

function labelLogLines(sessionId: string): number {
  const log = readFileSync(join(storageDir, sessionId, "labels.log"), "utf-8");
  return log.split("\n").filter(l => l.trim()).length;
}

describe("labeling flow (criterion 10)", () => {
  it("labels 3 pairs, decrements budget, re-ranks, suppresses duplicates, completes", async () => {
    const api = new LabelingApi(BASE);
    const started = await api.startSession({
      dataset_dir: datasetDir, strategy: "cvar", budget: 3,
      seed: 1, train_budget: 20, session_id: "ui-e2e",
    });
    expect(started.status).toBe("awaiting_label");

    const controller = new LabelingController(api, "ui-e2e");
    const states: ViewState[] = [];
    controller.onChange(s => states.push(s));
    await controller.attach();

    // first offer
    expect(controller.state.kind).toBe("labeling");
    let view = controller.state as Extract<ViewState, { kind: "labeling" }>;
    const firstPair = view.pair.pairId;
    expect(view.pair.remainingBudget).toBe(3);
    expect(renderState(view)).toContain("3 labels left");

    // label 1: budget decrements and the queue re-ranks to a different pair
    await controller.submit(view.pair.machineLabel === "match" ? "match" : "unmatch");
    view = controller.state as Extract<ViewState, { kind: "labeling" }>;
    expect(view.kind).toBe("labeling");
    expect(view.pair.remainingBudget).toBe(2);
    expect(view.pair.pairId).not.toBe(firstPair);
    expect(labelLogLines("ui-e2e")).toBe(1);

    // label 2 with a rapid double-submit: exactly one label event
    const secondPair = view.pair.pairId;
    const p1 = controller.submit("unmatch");
    const p2 = controller.submit("unmatch");
    expect(p2).toBe(p1); // same in-flight promise, no second POST
    await Promise.all([p1, p2]);
    view = controller.state as Extract<ViewState, { kind: "labeling" }>;
    expect(view.pair.remainingBudget).toBe(1);
    expect(view.pair.pairId).not.toBe(secondPair);
    expect(labelLogLines("ui-e2e")).toBe(2);

    // a replayed event (same seq/pair/label) is acknowledged, not re-applied
    const dupAck = await api.submitLabel("ui-e2e", 2, secondPair, "unmatch");
    expect(dupAck.duplicate).toBe(true);
    expect(dupAck.metrics.consumed_budget).toBe(2);
    expect(labelLogLines("ui-e2e")).toBe(2);

    // label 3: budget exhausted, completion screen appears
    await controller.submit("match");
    expect(controller.state.kind).toBe("complete");
    const done = controller.state as Extract<ViewState, { kind: "complete" }>;
    expect(done.metrics.consumed_budget).toBe(3);
    const html = renderState(done);
    expect(html).toContain("Session complete");
    expect(html).toContain("3 of 3 labels used");
    expect(labelLogLines("ui-e2e")).toBe(3);

    // every state the UI passed through came from service responses
    expect(states.every(s => s.kind === "labeling" || s.kind === "complete")).toBe(true);
  }, 120_000);

  it("recovers from a stale submit by refetching the current offer", async () => {
    const api = new LabelingApi(BASE);
    await api.startSession({
      dataset_dir: datasetDir, strategy: "cvar", budget: 2,
      seed: 2, train_budget: 20, session_id: "ui-stale",
    });
    const controller = new LabelingController(api, "ui-stale");
    await controller.attach();
    const view = controller.state as Extract<ViewState, { kind: "labeling" }>;

    // another client labels the offered pair behind our back
    await api.submitLabel("ui-stale", 1, view.pair.pairId, "unmatch");

    // our submit now carries a stale seq; the controller must resync
    await controller.submit("match");
    expect(controller.state.kind).toBe("labeling");
    const after = controller.state as Extract<ViewState, { kind: "labeling" }>;
    expect(after.pair.pairId).not.toBe(view.pair.pairId);
    expect(after.notice).toContain("refreshed");
    expect(labelLogLines("ui-stale")).toBe(1);
  }, 120_000);
});
