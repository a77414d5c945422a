/**
 * Train the sidecar's language model on the decoder's bundled corpus and
 * write the checkpoint the server loads at startup.
 *
 *   node dist/scripts/train.js [corpus.txt ...] [--out model/weights.json]
 *
 * Without arguments the primary package's corpus and phrase files are used.
 */

import * as tf from "@tensorflow/tfjs";
import "@tensorflow/tfjs-backend-wasm";
import { readFileSync } from "node:fs";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";

import {
  CONTEXT,
  LanguageModel,
  ModelConfig,
  Tokenizer,
  forward,
  initWeights,
  normalize,
  windows,
} from "../src/model.js";

const HERE = dirname(fileURLToPath(import.meta.url));
const PACKAGE_ROOT = join(HERE, "..", "..");
const DEFAULT_CORPORA = [
  join(PACKAGE_ROOT, "..", "src", "visemedecode", "data", "corpus_small.txt"),
  join(PACKAGE_ROOT, "..", "src", "visemedecode", "data", "ouluvs_phrases.txt"),
];

const EPOCHS = parseInt(process.env.EPOCHS ?? "400", 10);
const LEARNING_RATE = 0.01;

function loadSentences(paths: string[]): string[][] {
  const sentences: string[][] = [];
  for (const path of paths) {
    for (const chunk of readFileSync(path, "utf-8").split(/[.!?\n]+/)) {
      const words = normalize(chunk);
      if (words.length > 0) sentences.push(words);
    }
  }
  return sentences;
}

async function main() {
  try {
    await tf.setBackend("wasm");
  } catch {
    await tf.setBackend("cpu");
  }
  await tf.ready();
  console.error(`tf backend: ${tf.getBackend()}`);

  const args = process.argv.slice(2);
  let out = join(PACKAGE_ROOT, "model", "weights.json");
  const corpora: string[] = [];
  for (let i = 0; i < args.length; i++) {
    if (args[i] === "--out") {
      out = args[++i];
    } else {
      corpora.push(args[i]);
    }
  }
  const sentences = loadSentences(corpora.length ? corpora : DEFAULT_CORPORA);
  const tokenizer = Tokenizer.fromCorpus(sentences);
  console.error(`training on ${sentences.length} sentences, vocab ${tokenizer.size}`);

  const allInputs: number[][] = [];
  const allTargets: number[] = [];
  for (const sentence of sentences) {
    const { inputs, targets } = windows(tokenizer.encode(sentence), CONTEXT);
    allInputs.push(...inputs);
    allTargets.push(...targets);
  }
  console.error(`${allTargets.length} training positions`);

  const config: ModelConfig = {
    vocab: tokenizer.vocab,
    context: CONTEXT,
    embeddingDim: 48,
    hiddenUnits: 128,
  };
  const weights = initWeights(config, tokenizer.size);
  const optimizer = tf.train.adam(LEARNING_RATE);
  const contexts = tf.tensor2d(allInputs, [allInputs.length, CONTEXT], "int32");
  const targets = tf.oneHot(tf.tensor1d(allTargets, "int32"), tokenizer.size);

  const lossFn = () => {
    const probs = forward(weights, contexts, config, tokenizer.size);
    const logProbs = tf.log(tf.maximum(probs, 1e-12));
    return tf.neg(tf.mean(tf.sum(tf.mul(targets, logProbs), -1))) as tf.Scalar;
  };

  for (let epoch = 1; epoch <= EPOCHS; epoch++) {
    const loss = optimizer.minimize(lossFn, true) as tf.Scalar;
    if (epoch % 50 === 0 || epoch === 1) {
      console.error(`epoch ${epoch}: loss ${loss.dataSync()[0].toFixed(4)}`);
    }
    loss.dispose();
  }

  const model = new LanguageModel(tokenizer, weights, config);
  model.save(out);
  console.error(`wrote ${out}`);
  console.error(`PP("EXCUSE ME") = ${model.perplexity("EXCUSE ME").toFixed(2)}`);
  console.error(`PP("ME EXCUSE") = ${model.perplexity("ME EXCUSE").toFixed(2)}`);
}

main().catch((err) => {
  console.error(err);
  process.exit(1);
});
