/**
 * Tokenizer mirroring the risk engine's rules: lowercase, then take maximal
 * runs of [0-9a-z]. Keeping the rules identical means the tokens the UI
 * highlights are exactly the tokens that carry evidence server-side.
 */

const TOKEN_RE = /[0-9a-z]+/g;

export function tokenize(text: string | null | undefined): string[] {
  if (!text) return [];
  return text.toLowerCase().match(TOKEN_RE) ?? [];
}

export function tokenSet(text: string | null | undefined): Set<string> {
  return new Set(tokenize(text));
}
