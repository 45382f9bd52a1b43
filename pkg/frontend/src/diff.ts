/**
 * Attribute-level token diff between the two sides of a record pair.
 *
 * A segment is marked `diff` when its token is absent from the other side's
 * token set for the same attribute; whitespace and punctuation pass through
 * unmarked so the original string renders verbatim.
 */

import { tokenize, tokenSet } from "./tokenize.js";

export interface Segment {
  text: string;
  diff: boolean;
}

/** Split `value` into verbatim segments, marking tokens missing from `other`. */
export function diffSegments(value: string | null | undefined,
                             other: string | null | undefined): Segment[] {
  if (!value) return [];
  const otherTokens = tokenSet(other);
  const segments: Segment[] = [];
  const re = /[0-9a-zA-Z]+/g;
  let last = 0;
  let m: RegExpExecArray | null;
  while ((m = re.exec(value)) !== null) {
    if (m.index > last) segments.push({ text: value.slice(last, m.index), diff: false });
    segments.push({ text: m[0], diff: !otherTokens.has(m[0].toLowerCase()) });
    last = m.index + m[0].length;
  }
  if (last < value.length) segments.push({ text: value.slice(last), diff: false });
  return segments;
}

/** Count of highlighted tokens on one side (used by tests and the badge). */
export function diffCount(value: string | null | undefined,
                          other: string | null | undefined): number {
  return diffSegments(value, other).filter(s => s.diff).length;
}

/** Tokens present in exactly one side, mirroring the engine's Diff(t) features. */
export function symmetricDiffTokens(a: string | null | undefined,
                                    b: string | null | undefined): Set<string> {
  const ta = tokenSet(a);
  const tb = tokenSet(b);
  const out = new Set<string>();
  for (const t of ta) if (!tb.has(t)) out.add(t);
  for (const t of tb) if (!ta.has(t)) out.add(t);
  return out;
}

export { tokenize, tokenSet };
