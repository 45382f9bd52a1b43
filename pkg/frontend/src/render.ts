/** Pure HTML rendering of a view state; no DOM access, so tests run in node. */

import { Segment } from "./diff.js";
import { ViewState } from "./controller.js";

function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

function renderSegments(segments: Segment[]): string {
  return segments
    .map(s => (s.diff ? `<mark class="diff">${escapeHtml(s.text)}</mark>` : escapeHtml(s.text)))
    .join("");
}

export function renderState(state: ViewState): string {
  switch (state.kind) {
    case "loading":
      return `<p class="loading">loading…</p>`;
    case "error":
      return `<p class="error">${escapeHtml(state.message)}</p>`;
    case "complete": {
      const m = state.metrics;
      const quality = m.f1 !== undefined
        ? `<p>precision ${m.precision!.toFixed(3)} · recall ${m.recall!.toFixed(3)} · F1 ${m.f1.toFixed(3)}</p>`
        : "";
      return `<section class="complete">
  <h2>Session complete</h2>
  <p>${m.consumed_budget} of ${m.budget} labels used · ${m.pickup} machine errors corrected</p>
  ${quality}
  <p><a href="#" data-action="report">View final report</a></p>
</section>`;
    }
    case "labeling": {
      const p = state.pair;
      const rows = p.rows
        .map(r => `<tr>
    <th>${escapeHtml(r.name)}</th>
    <td>${renderSegments(r.left)}</td>
    <td>${renderSegments(r.right)}</td>
  </tr>`)
        .join("\n");
      const notice = state.notice ? `<p class="notice">${escapeHtml(state.notice)}</p>` : "";
      return `<section class="pair" data-pair-id="${escapeHtml(p.pairId)}">
  ${notice}
  <header>
    <span class="badge badge-${p.machineLabel}">machine: ${p.machineLabel}</span>
    <span class="risk">risk ${p.risk.toFixed(3)}</span>
    <span class="budget">${p.remainingBudget} labels left</span>
  </header>
  <table>
    <thead><tr><th></th><th>${escapeHtml(p.leftId)}</th><th>${escapeHtml(p.rightId)}</th></tr></thead>
    <tbody>
${rows}
    </tbody>
  </table>
  <footer>
    <button data-action="match" accesskey="m">Match <kbd>m</kbd></button>
    <button data-action="unmatch" accesskey="u">Unmatch <kbd>u</kbd></button>
  </footer>
</section>`;
    }
  }
}

/** Number of highlighted tokens in a rendered fragment (test helper). */
export function countHighlights(html: string): number {
  return (html.match(/<mark class="diff">/g) ?? []).length;
}
