/**
 * UI state machine for one labeling session.
 *
 * All state is derived from service responses: refreshing the page and
 * re-attaching to the same session id reconstructs an identical view. The
 * only client-held counter is the event sequence number, re-derived from the
 * consumed budget on attach.
 */

import { ApiError, LabelingApi, SessionMetrics } from "./api.js";
import { Segment, diffSegments } from "./diff.js";

export interface AttributeRow {
  name: string;
  left: Segment[];
  right: Segment[];
}

export interface PairView {
  pairId: string;
  leftId: string;
  rightId: string;
  rows: AttributeRow[];
  machineLabel: "match" | "unmatch";
  risk: number;
  remainingBudget: number;
}

export type ViewState =
  | { kind: "loading" }
  | { kind: "labeling"; pair: PairView; metrics: SessionMetrics | null; notice: string | null }
  | { kind: "complete"; metrics: SessionMetrics; report: unknown }
  | { kind: "error"; message: string };

export class LabelingController {
  state: ViewState = { kind: "loading" };
  private seq = 1;
  private inFlight: Promise<void> | null = null;
  private listeners: Array<(s: ViewState) => void> = [];

  constructor(private api: LabelingApi, private sessionId: string) {}

  onChange(fn: (s: ViewState) => void): void {
    this.listeners.push(fn);
  }

  private setState(s: ViewState): void {
    this.state = s;
    for (const fn of this.listeners) fn(s);
  }

  /** Attach to the session: derive seq from consumed budget, render. */
  async attach(): Promise<void> {
    try {
      const metrics = await this.api.metrics(this.sessionId);
      this.seq = metrics.consumed_budget + 1;
      await this.refresh(metrics);
    } catch (err) {
      this.setState({ kind: "error", message: String(err) });
    }
  }

  /** Fetch the current offer (idempotent server-side) and rebuild the view. */
  async refresh(metrics?: SessionMetrics, notice: string | null = null): Promise<void> {
    const next = await this.api.nextPair(this.sessionId);
    if (next.status === "complete" || !next.pair) {
      const m = metrics ?? (await this.api.metrics(this.sessionId));
      const report = await this.api.report(this.sessionId);
      this.setState({ kind: "complete", metrics: m, report });
      return;
    }
    const p = next.pair;
    const names = [...new Set([
      ...Object.keys(p.left.attributes),
      ...Object.keys(p.right.attributes),
    ])];
    const rows: AttributeRow[] = names.map(name => ({
      name,
      left: diffSegments(p.left.attributes[name], p.right.attributes[name]),
      right: diffSegments(p.right.attributes[name], p.left.attributes[name]),
    }));
    this.setState({
      kind: "labeling",
      pair: {
        pairId: p.pair_id,
        leftId: p.left.id,
        rightId: p.right.id,
        rows,
        machineLabel: p.machine_label,
        risk: p.risk,
        remainingBudget: next.remaining_budget ?? 0,
      },
      metrics: metrics ?? null,
      notice,
    });
  }

  /**
   * Submit a label for the currently offered pair.
   *
   * While an acknowledgement is pending, further calls return the same
   * promise without issuing another request, so a rapid double-click (or
   * repeated keypress) produces exactly one label event.
   */
  submit(choice: "match" | "unmatch"): Promise<void> {
    if (this.inFlight) return this.inFlight;
    if (this.state.kind !== "labeling") return Promise.resolve();
    const pairId = this.state.pair.pairId;
    this.inFlight = this.doSubmit(pairId, choice).finally(() => {
      this.inFlight = null;
    });
    return this.inFlight;
  }

  private async doSubmit(pairId: string, choice: "match" | "unmatch"): Promise<void> {
    try {
      const ack = await this.api.submitLabel(this.sessionId, this.seq, pairId, choice);
      this.seq = ack.seq + 1;
      await this.refresh(ack.metrics);
    } catch (err) {
      if (err instanceof ApiError && err.status === 409) {
        // stale offer or sequence drift: re-derive state from the service
        const metrics = await this.api.metrics(this.sessionId);
        this.seq = metrics.consumed_budget + 1;
        await this.refresh(metrics, `out of sync with service, refreshed: ${err.detail}`);
        return;
      }
      this.setState({ kind: "error", message: String(err) });
    }
  }
}
