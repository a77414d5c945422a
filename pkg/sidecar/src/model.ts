/**
 * Compact causal language model for sentence perplexity.
 *
 * Word-level tokenizer feeding a fixed-window neural language model: the
 * embeddings of the previous CONTEXT tokens are concatenated and passed
 * through one hidden layer to a softmax over the vocabulary.  The model
 * is autoregressive with a bounded receptive field; weights are held as
 * explicit tensors (embedding lookups as one-hot matmuls) so both
 * training and inference run on the wasm backend.
 *
 * Perplexity is the exponentiated mean per-token negative log-likelihood,
 * where the tokens are the sentence's words (unknown words fall back to
 * the <unk> class) followed by the end-of-sentence token.
 */

import * as tf from "@tensorflow/tfjs";
import { readFileSync, writeFileSync } from "node:fs";

export const PAD = 0;
export const BOS = 1;
export const EOS = 2;
export const UNK = 3;
const RESERVED = ["<pad>", "<s>", "</s>", "<unk>"];

export const CONTEXT = 3; // previous tokens visible to the model

export interface ModelConfig {
  vocab: string[]; // words only; ids start at RESERVED.length
  context: number;
  embeddingDim: number;
  hiddenUnits: number;
}

export function normalize(text: string): string[] {
  return text
    .toUpperCase()
    .replace(/[^A-Z']+/g, " ")
    .split(" ")
    .filter((t) => t.replace(/'/g, "").length > 0);
}

export class Tokenizer {
  private ids = new Map<string, number>();

  constructor(public vocab: string[]) {
    vocab.forEach((w, i) => this.ids.set(w, i + RESERVED.length));
  }

  static fromCorpus(sentences: string[][]): Tokenizer {
    const words = new Set<string>();
    for (const sentence of sentences) for (const w of sentence) words.add(w);
    return new Tokenizer([...words].sort());
  }

  get size(): number {
    return this.vocab.length + RESERVED.length;
  }

  encode(words: string[]): number[] {
    return words.map((w) => this.ids.get(w) ?? UNK);
  }

  describe(id: number): string {
    return id < RESERVED.length ? RESERVED[id] : this.vocab[id - RESERVED.length];
  }
}

/** Sliding context windows and next-token targets for one sentence. */
export function windows(tokens: number[], context: number) {
  const padded = [...Array(context).fill(BOS), ...tokens];
  const inputs: number[][] = [];
  const targets: number[] = [...tokens, EOS];
  for (let t = 0; t < targets.length; t++) {
    inputs.push(padded.slice(t, t + context));
  }
  return { inputs, targets };
}

export interface Weights {
  embedding: tf.Variable; // [V, D]
  hiddenKernel: tf.Variable; // [K*D, H]
  hiddenBias: tf.Variable; // [H]
  outputKernel: tf.Variable; // [H, V]
  outputBias: tf.Variable; // [V]
}

export function initWeights(config: ModelConfig, vocabSize: number, seed = 7): Weights {
  const { context, embeddingDim, hiddenUnits } = config;
  const scale = (fanIn: number) => Math.sqrt(1 / fanIn);
  return {
    embedding: tf.variable(
      tf.randomNormal([vocabSize, embeddingDim], 0, 0.1, "float32", seed)
    ),
    hiddenKernel: tf.variable(
      tf.randomNormal(
        [context * embeddingDim, hiddenUnits],
        0,
        scale(context * embeddingDim),
        "float32",
        seed + 1
      )
    ),
    hiddenBias: tf.variable(tf.zeros([hiddenUnits])),
    outputKernel: tf.variable(
      tf.randomNormal([hiddenUnits, vocabSize], 0, scale(hiddenUnits), "float32", seed + 2)
    ),
    outputBias: tf.variable(tf.zeros([vocabSize])),
  };
}

/** Softmax over next tokens for a batch of context windows [N, K]. */
export function forward(
  weights: Weights,
  contexts: tf.Tensor2D,
  config: ModelConfig,
  vocabSize: number
): tf.Tensor2D {
  const [n, k] = contexts.shape;
  const flatIds = tf.reshape(contexts, [n * k]);
  const oneHot = tf.oneHot(flatIds, vocabSize); // [N*K, V]
  const embedded = tf.matMul(tf.cast(oneHot, "float32"), weights.embedding); // [N*K, D]
  const stacked = tf.reshape(embedded, [n, k * config.embeddingDim]);
  const hidden = tf.tanh(tf.add(tf.matMul(stacked, weights.hiddenKernel), weights.hiddenBias));
  const logits = tf.add(tf.matMul(hidden, weights.outputKernel), weights.outputBias);
  return tf.softmax(logits) as tf.Tensor2D;
}

export class LanguageModel {
  constructor(
    public tokenizer: Tokenizer,
    public weights: Weights,
    public config: ModelConfig
  ) {}

  /** exp(mean per-token NLL) over the words plus the end-of-sentence token. */
  perplexity(text: string): number {
    const words = normalize(text);
    if (words.length === 0) {
      throw new Error("empty");
    }
    const tokens = this.tokenizer.encode(words);
    const { inputs, targets } = windows(tokens, this.config.context);
    return tf.tidy(() => {
      const probs = forward(
        this.weights,
        tf.tensor2d(inputs, [inputs.length, this.config.context], "int32"),
        this.config,
        this.tokenizer.size
      );
      const rows = probs.arraySync() as number[][];
      let nll = 0;
      for (let t = 0; t < targets.length; t++) {
        nll += -Math.log(Math.max(rows[t][targets[t]], 1e-12));
      }
      return Math.exp(nll / targets.length);
    });
  }

  save(path: string): void {
    const dump = (v: tf.Variable) => ({
      shape: v.shape,
      values: Array.from(v.dataSync()),
    });
    const payload = {
      format: "viseme-scorer-lm",
      version: 1,
      config: this.config,
      weights: {
        embedding: dump(this.weights.embedding),
        hiddenKernel: dump(this.weights.hiddenKernel),
        hiddenBias: dump(this.weights.hiddenBias),
        outputKernel: dump(this.weights.outputKernel),
        outputBias: dump(this.weights.outputBias),
      },
    };
    writeFileSync(path, JSON.stringify(payload));
  }

  static load(path: string): LanguageModel {
    const payload = JSON.parse(readFileSync(path, "utf-8"));
    if (payload.format !== "viseme-scorer-lm") {
      throw new Error(`${path} is not a serialized scorer model`);
    }
    const config: ModelConfig = payload.config;
    const tokenizer = new Tokenizer(config.vocab);
    const restore = (w: { shape: number[]; values: number[] }) =>
      tf.variable(tf.tensor(w.values, w.shape, "float32"));
    const weights: Weights = {
      embedding: restore(payload.weights.embedding),
      hiddenKernel: restore(payload.weights.hiddenKernel),
      hiddenBias: restore(payload.weights.hiddenBias),
      outputKernel: restore(payload.weights.outputKernel),
      outputBias: restore(payload.weights.outputBias),
    };
    return new LanguageModel(tokenizer, weights, config);
  }
}
