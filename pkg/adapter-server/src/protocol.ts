/**
 * Wire protocol for the extractive-QA adapter.
 *
 * One JSON object per message: requests are {id, question, context},
 * responses {id, answer, score, start, end}, failures {id, error}.
 * start/end delimit the answer in the request context, end exclusive.
 */

export interface AnswerRequest {
  id: string;
  question: string;
  context: string;
}

export interface Span {
  answer: string;
  score: number;
  start: number;
  end: number;
}

export interface AnswerResponse extends Span {
  id: string;
}

export interface ErrorResponse {
  id: string;
  error: string;
}

/** A malformed incoming message; carries whatever id could be recovered. */
export class ProtocolError extends Error {
  readonly requestId: string;

  constructor(message: string, requestId = "") {
    super(message);
    this.name = "ProtocolError";
    this.requestId = requestId;
  }
}

function recoverId(value: unknown): string {
  if (typeof value === "object" && value !== null) {
    const id = (value as Record<string, unknown>).id;
    if (typeof id === "string") {
      return id;
    }
  }
  return "";
}

export function parseRequest(line: string): AnswerRequest {
  let raw: unknown;
  try {
    raw = JSON.parse(line);
  } catch (error) {
    throw new ProtocolError(`request is not valid JSON: ${(error as Error).message}`);
  }
  if (typeof raw !== "object" || raw === null || Array.isArray(raw)) {
    throw new ProtocolError("request must be a JSON object", recoverId(raw));
  }
  const record = raw as Record<string, unknown>;
  const id = record.id;
  if (typeof id !== "string" || id.length === 0) {
    throw new ProtocolError("request id must be a non-empty string");
  }
  for (const field of ["question", "context"] as const) {
    if (typeof record[field] !== "string") {
      throw new ProtocolError(`request is missing string field "${field}"`, id);
    }
  }
  return { id, question: record.question as string, context: record.context as string };
}

export function encodeResponse(id: string, span: Span): string {
  return JSON.stringify({
    id,
    answer: span.answer,
    score: span.score,
    start: span.start,
    end: span.end,
  });
}

export function encodeError(id: string, message: string): string {
  return JSON.stringify({ id, error: message });
}
