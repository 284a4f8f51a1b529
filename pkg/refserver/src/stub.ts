/**
 * Deterministic stub behaviors behind the three wire-protocol roles.
 *
 * - translate: dictionary lookup, else the input echoed with a ⟪lang⟫ prefix
 * - score: the lexical baseline formula
 * - generate: extractive, first candidate wins; NO-CONTEXT when empty
 *
 * Real model adapters (an MT API, a cross-encoder scorer, a seq2seq
 * generator) plug in by replacing these three functions behind the same
 * routes; nothing in the protocol changes.
 */

import { lexicalScore } from "./lexical";

export const ECHO_OPEN = "⟪"; // ⟪
export const ECHO_CLOSE = "⟫"; // ⟫
export const CLOSED_BOOK_ANSWER = "NO-CONTEXT";

export interface StubConfig {
  translateMap?: Record<string, string>;
}

export interface WireCandidate {
  text: string;
  lang: string;
}

export function translateStub(
  text: string,
  targetLang: string,
  config: StubConfig = {},
): string {
  const mapped = config.translateMap?.[text];
  if (mapped !== undefined) return mapped;
  return `${ECHO_OPEN}${targetLang}${ECHO_CLOSE} ${text}`;
}

export function scoreStub(question: string, candidates: string[]): number[] {
  return candidates.map((c) => lexicalScore(question, c));
}

export function generateStub(candidates: WireCandidate[]): string {
  if (candidates.length === 0) return CLOSED_BOOK_ANSWER;
  return candidates[0].text;
}
