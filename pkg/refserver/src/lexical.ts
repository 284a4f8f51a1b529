/**
 * Tokenizer and lexical scorer mirroring the engine's implementation.
 *
 * The formula is duplicated on purpose (not proxied back to the engine) so
 * that score parity between the two codebases is a real cross-implementation
 * test: NFKC + casefold, word-character runs as tokens, CJK runs expanded
 * into character bigrams, then |T(q) ∩ T(c)| / |T(q)|.
 */

// Same code-point ranges as the engine; bigram-tokenized scripts.
const CJK_RANGES: Array<[number, number]> = [
  [0x3040, 0x309f], // hiragana
  [0x30a0, 0x30ff], // katakana
  [0x3400, 0x4dbf], // han extension A
  [0x4e00, 0x9fff], // han
  [0xf900, 0xfaff], // han compatibility
  [0x20000, 0x2a6df], // han extension B
];

const WORD_CHAR = /[\p{L}\p{M}\p{N}]/u;

function isCjk(cp: number): boolean {
  for (const [lo, hi] of CJK_RANGES) {
    if (cp >= lo && cp <= hi) return true;
  }
  return false;
}

/**
 * NFKC + case folding. toLowerCase covers everything the engine's casefold
 * does for the supported scripts except the sharp s full fold, which is
 * patched explicitly.
 */
export function foldCase(text: string): string {
  return text.normalize("NFKC").toLowerCase().replace(/ß/g, "ss");
}

export function tokenize(text: string, _lang = "en"): string[] {
  const normalized = foldCase(text);
  const tokens: string[] = [];
  let word = "";
  let cjkRun: string[] = [];

  const flushWord = () => {
    if (word) {
      tokens.push(word);
      word = "";
    }
  };
  const flushCjk = () => {
    if (cjkRun.length === 1) {
      tokens.push(cjkRun[0]);
    } else {
      for (let i = 0; i + 1 < cjkRun.length; i++) {
        tokens.push(cjkRun[i] + cjkRun[i + 1]);
      }
    }
    cjkRun = [];
  };

  for (const ch of normalized) {
    const cp = ch.codePointAt(0)!;
    if (isCjk(cp)) {
      flushWord();
      cjkRun.push(ch);
    } else if (WORD_CHAR.test(ch)) {
      if (cjkRun.length) flushCjk();
      word += ch;
    } else {
      flushWord();
      if (cjkRun.length) flushCjk();
    }
  }
  flushWord();
  if (cjkRun.length) flushCjk();
  return tokens;
}

/** Unique-token question coverage; 0 when the question has no tokens. */
export function lexicalScore(
  question: string,
  candidate: string,
  qLang = "en",
  cLang = "en",
): number {
  const qTokens = new Set(tokenize(question, qLang));
  if (qTokens.size === 0) return 0.0;
  const cTokens = new Set(tokenize(candidate, cLang));
  let hits = 0;
  for (const t of qTokens) {
    if (cTokens.has(t)) hits += 1;
  }
  return hits / qTokens.size;
}
