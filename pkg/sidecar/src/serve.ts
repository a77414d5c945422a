/**
 * Scorer sidecar: line-delimited JSON protocol on stdin/stdout.
 *
 *   handshake (emitted once the model is loaded):
 *     {"hello":"viseme-scorer","version":1,"tokens":"words+eos"}
 *   request:   {"id":1,"texts":["EXCUSE ME", ...]}
 *   response:  {"id":1,"ppl":[5.31, ...]}   or   {"id":1,"error":"..."}
 *
 * Diagnostics go to stderr only.  The token-count convention declared in
 * the handshake: perplexity averages over the model's tokens, i.e. the
 * sentence words (unknowns as one <unk> class) plus the end token.
 */

// tfjs prints an environment banner through console.log; everything on
// stdout must be protocol, so route console output to stderr before the
// model code loads.
console.log = (...args: unknown[]) => console.error(...args);

import { createInterface } from "node:readline";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";

const HERE = dirname(fileURLToPath(import.meta.url));
const DEFAULT_MODEL = join(HERE, "..", "..", "model", "weights.json");

function emit(message: object): void {
  process.stdout.write(JSON.stringify(message) + "\n");
}

async function main() {
  const args = process.argv.slice(2);
  let modelPath = DEFAULT_MODEL;
  let maxBatch = 64;
  let backend = "wasm";
  for (let i = 0; i < args.length; i++) {
    if (args[i] === "--model") modelPath = args[++i];
    else if (args[i] === "--max-batch") maxBatch = parseInt(args[++i], 10);
    else if (args[i] === "--backend") backend = args[++i];
  }

  const tf = await import("@tensorflow/tfjs");
  try {
    if (backend === "wasm") {
      await import("@tensorflow/tfjs-backend-wasm");
    }
    await tf.setBackend(backend);
  } catch {
    await tf.setBackend("cpu");
  }
  await tf.ready();
  console.error(`scorer sidecar: backend=${tf.getBackend()} model=${modelPath}`);

  const { LanguageModel } = await import("./model.js");
  const model = LanguageModel.load(modelPath); // must succeed before the handshake
  emit({ hello: "viseme-scorer", version: 1, tokens: "words+eos" });

  const lines = createInterface({ input: process.stdin, terminal: false });
  for await (const line of lines) {
    if (!line.trim()) continue;
    let request: { id?: unknown; texts?: unknown };
    try {
      request = JSON.parse(line);
    } catch {
      emit({ id: -1, error: "malformed request: not valid JSON" });
      continue;
    }
    const id = typeof request.id === "number" ? request.id : -1;
    const texts = request.texts;
    if (!Array.isArray(texts) || texts.some((t) => typeof t !== "string")) {
      emit({ id, error: "malformed request: texts must be an array of strings" });
      continue;
    }
    if (texts.length === 0) {
      emit({ id, error: "empty" });
      continue;
    }
    try {
      const ppl: number[] = [];
      for (let start = 0; start < texts.length; start += maxBatch) {
        for (const text of texts.slice(start, start + maxBatch)) {
          ppl.push(model.perplexity(text));
        }
      }
      emit({ id, ppl });
    } catch (err) {
      emit({ id, error: String(err instanceof Error ? err.message : err) });
    }
  }
}

main().catch((err) => {
  console.error(err);
  process.exit(1);
});
