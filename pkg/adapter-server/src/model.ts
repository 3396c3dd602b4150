/**
 * Model-backed answerer wrapping an extractive QA pipeline.
 *
 * Loads @xenova/transformers lazily so the stub mode never needs it,
 * and only from a local model directory: this process never downloads
 * weights.  The pipeline reports no character offsets, so the span is
 * located by searching the context for the predicted answer text.
 */

import path from "node:path";

import type { Span } from "./protocol.js";

// Resolved at runtime only, so stub-only installs never need the package.
const TRANSFORMERS_MODULE = "@xenova/transformers";

let qaPipeline: ((question: string, context: string) => Promise<unknown>) | null = null;

export async function loadModel(modelDir: string): Promise<void> {
  let transformers: any;
  try {
    transformers = await import(TRANSFORMERS_MODULE);
  } catch (error) {
    throw new Error(
      `model mode needs the ${TRANSFORMERS_MODULE} package: ${(error as Error).message}`,
    );
  }
  const resolved = path.resolve(modelDir);
  transformers.env.allowRemoteModels = false;
  transformers.env.localModelPath = path.dirname(resolved);
  qaPipeline = await transformers.pipeline("question-answering", path.basename(resolved));
}

export async function modelAnswer(question: string, context: string): Promise<Span> {
  if (qaPipeline === null) {
    throw new Error("model not loaded; call loadModel first");
  }
  const raw = (await qaPipeline(question, context)) as { answer?: unknown; score?: unknown };
  const answer = typeof raw.answer === "string" ? raw.answer.trim() : "";
  const score = typeof raw.score === "number" && Number.isFinite(raw.score) ? raw.score : 0;
  const start = answer.length > 0 ? context.indexOf(answer) : -1;
  if (start < 0) {
    return { answer: "", score: 0, start: 0, end: 0 };
  }
  return { answer, score, start, end: start + answer.length };
}
