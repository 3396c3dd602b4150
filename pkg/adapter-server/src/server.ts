/**
 * Transports: newline-delimited JSON on stdio, or one POST per request.
 *
 * Requests are answered strictly in arrival order; a malformed request
 * gets an error response carrying whatever id could be recovered and
 * the stream stays up.
 */

import http from "node:http";
import readline from "node:readline";

import { ProtocolError, encodeError, encodeResponse, parseRequest } from "./protocol.js";
import type { Span } from "./protocol.js";

export type Answerer = (question: string, context: string) => Span | Promise<Span>;

async function handleLine(line: string, answerer: Answerer): Promise<string> {
  let requestId = "";
  try {
    const request = parseRequest(line);
    requestId = request.id;
    const span = await answerer(request.question, request.context);
    return encodeResponse(request.id, span);
  } catch (error) {
    if (error instanceof ProtocolError) {
      return encodeError(error.requestId || requestId, error.message);
    }
    return encodeError(requestId, `answerer failed: ${(error as Error).message}`);
  }
}

export async function runStdio(answerer: Answerer): Promise<void> {
  const lines = readline.createInterface({
    input: process.stdin,
    crlfDelay: Number.POSITIVE_INFINITY,
  });
  for await (const line of lines) {
    if (line.trim().length === 0) {
      continue;
    }
    process.stdout.write(`${await handleLine(line, answerer)}\n`);
  }
}

export function createHttpServer(answerer: Answerer): http.Server {
  return http.createServer((request, response) => {
    if (request.method !== "POST") {
      response.writeHead(405, { "content-type": "application/json" });
      response.end(encodeError("", "only POST is supported"));
      return;
    }
    const chunks: Buffer[] = [];
    request.on("data", (chunk: Buffer) => chunks.push(chunk));
    request.on("end", () => {
      void handleLine(Buffer.concat(chunks).toString("utf-8"), answerer).then((body) => {
        response.writeHead(200, { "content-type": "application/json" });
        response.end(body);
      });
    });
  });
}
