#!/usr/bin/env node
/**
 * CLI entry: pick a mode and a transport, then serve.
 *
 *   node dist/main.js --stdio                       # stub over stdio
 *   node dist/main.js --port 8040                   # stub over HTTP
 *   node dist/main.js --stdio --mode model --model ./weights/distilbert
 *
 * Model mode also honors DOCQAKIT_QA_MODEL when --model is omitted.
 */

import { parseCliOptions } from "./cli.js";
import type { CliOptions } from "./cli.js";
import { loadModel, modelAnswer } from "./model.js";
import { createHttpServer, runStdio } from "./server.js";
import type { Answerer } from "./server.js";
import { stubAnswer } from "./stub.js";

async function main(): Promise<void> {
  let options: CliOptions;
  try {
    options = parseCliOptions(process.argv.slice(2));
  } catch (error) {
    console.error(`error: ${(error as Error).message}`);
    process.exitCode = 1;
    return;
  }

  let answerer: Answerer = stubAnswer;
  if (options.mode === "model") {
    await loadModel(options.modelDir);
    answerer = modelAnswer;
  }

  if (options.transport === "stdio") {
    await runStdio(answerer);
    return;
  }
  const server = createHttpServer(answerer);
  server.listen(options.port, () => {
    const address = server.address();
    const port = typeof address === "object" && address !== null ? address.port : options.port;
    console.error(`listening on http://127.0.0.1:${port}`);
  });
}

void main().catch((error: Error) => {
  console.error(`fatal: ${error.message}`);
  process.exitCode = 1;
});
