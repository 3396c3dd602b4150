/** Flag parsing for the server entry point. */

import { parseArgs } from "node:util";

export interface CliOptions {
  mode: "stub" | "model";
  transport: "stdio" | "http";
  port: number;
  modelDir: string;
}

export function parseCliOptions(argv: string[], env: NodeJS.ProcessEnv = process.env): CliOptions {
  const { values } = parseArgs({
    args: argv,
    options: {
      mode: { type: "string", default: "stub" },
      stdio: { type: "boolean", default: false },
      port: { type: "string" },
      model: { type: "string" },
    },
  });
  if (values.mode !== "stub" && values.mode !== "model") {
    throw new Error(`unknown mode "${values.mode}"; expected stub or model`);
  }
  if (values.stdio && values.port !== undefined) {
    throw new Error("pass either --stdio or --port, not both");
  }
  let port = 0;
  if (values.port !== undefined) {
    port = Number(values.port);
    if (!Number.isInteger(port) || port < 0 || port > 65535) {
      throw new Error(`invalid port "${values.port}"`);
    }
  }
  const modelDir = values.model ?? env.DOCQAKIT_QA_MODEL ?? "";
  if (values.mode === "model" && modelDir.length === 0) {
    throw new Error("model mode needs --model <dir> or DOCQAKIT_QA_MODEL");
  }
  return {
    mode: values.mode,
    transport: values.port !== undefined ? "http" : "stdio",
    port,
    modelDir,
  };
}
