import { mkdtempSync, rmSync } from "node:fs";
import { tmpdir } from "node:os";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { BOS, EOS, UNK, LanguageModel, Tokenizer, normalize, windows } from "../src/model.js";

const HERE = dirname(fileURLToPath(import.meta.url));
const CHECKPOINT = join(HERE, "..", "model", "weights.json");

describe("tokenizer and windows", () => {
  it("normalizes like the decoder: uppercase, apostrophes kept", () => {
    expect(normalize("What's up, doc?!")).toEqual(["WHAT'S", "UP", "DOC"]);
    expect(normalize("  ")).toEqual([]);
  });

  it("maps unknown words to the unk id", () => {
    const tok = new Tokenizer(["HELLO", "WORLD"]);
    expect(tok.encode(["HELLO", "XYZZY"])).toEqual([4, UNK]);
    expect(tok.describe(UNK)).toBe("<unk>");
  });

  it("builds causal context windows with begin padding and an end target", () => {
    const { inputs, targets } = windows([10, 11], 3);
    expect(inputs).toEqual([
      [BOS, BOS, BOS],
      [BOS, BOS, 10],
      [BOS, 10, 11],
    ]);
    expect(targets).toEqual([10, 11, EOS]);
  });
});

describe("checkpoint", () => {
  let model: LanguageModel;
  let scratch: string;

  beforeAll(async () => {
    const tf = await import("@tensorflow/tfjs");
    await import("@tensorflow/tfjs-backend-wasm");
    await tf.setBackend("wasm").catch(() => tf.setBackend("cpu"));
    await tf.ready();
    model = LanguageModel.load(CHECKPOINT);
    scratch = mkdtempSync(join(tmpdir(), "scorer-test-"));
  }, 120_000);

  afterAll(() => {
    rmSync(scratch, { recursive: true, force: true });
  });

  it("computes perplexity above 1 and rejects empty input", () => {
    expect(model.perplexity("GOOD BYE")).toBeGreaterThan(1);
    expect(() => model.perplexity("   ")).toThrow("empty");
  });

  it("round-trips through save and load bit-exactly", () => {
    const path = join(scratch, "copy.json");
    model.save(path);
    const again = LanguageModel.load(path);
    const sentence = "NICE TO MEET YOU";
    expect(again.perplexity(sentence)).toBe(model.perplexity(sentence));
  });

  it("rejects foreign files", () => {
    expect(() => LanguageModel.load(join(HERE, "model.test.ts"))).toThrow();
  });
});
