/**
 * Deterministic stub answerer: no model, analytic behavior.
 *
 * The answer is the context token with the highest case-folded
 * normalized similarity to the last question keyword, scored by that
 * similarity.  Ties keep the leftmost token, so identical request
 * streams always produce identical responses.
 */

import { normalizedSimilarity } from "./levenshtein.js";
import type { Span } from "./protocol.js";

interface ContextToken {
  text: string;
  start: number;
  end: number;
}

const EDGE_PUNCTUATION = /^[^\p{L}\p{N}]+|[^\p{L}\p{N}]+$/gu;

/** Whitespace-split tokens with their character offsets in the context. */
export function tokenizeContext(context: string): ContextToken[] {
  const tokens: ContextToken[] = [];
  const matcher = /\S+/g;
  let match: RegExpExecArray | null;
  while ((match = matcher.exec(context)) !== null) {
    tokens.push({ text: match[0], start: match.index, end: match.index + match[0].length });
  }
  return tokens;
}

/** Question words with edge punctuation stripped; empties dropped. */
export function questionKeywords(question: string): string[] {
  return question
    .split(/\s+/)
    .map((word) => word.replace(EDGE_PUNCTUATION, ""))
    .filter((word) => word.length > 0);
}

const EMPTY_SPAN: Span = { answer: "", score: 0, start: 0, end: 0 };

export function stubAnswer(question: string, context: string): Span {
  const tokens = tokenizeContext(context);
  const keywords = questionKeywords(question);
  if (tokens.length === 0 || keywords.length === 0) {
    return EMPTY_SPAN;
  }
  const target = (keywords[keywords.length - 1] as string).toLowerCase();
  let best = tokens[0] as ContextToken;
  let bestScore = normalizedSimilarity(target, best.text.toLowerCase());
  for (const token of tokens.slice(1)) {
    const score = normalizedSimilarity(target, token.text.toLowerCase());
    if (score > bestScore) {
      best = token;
      bestScore = score;
    }
  }
  return { answer: best.text, score: bestScore, start: best.start, end: best.end };
}
