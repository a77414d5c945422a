/**
 * Protocol conformance and scoring sanity, driven against the live
 * server process with the committed checkpoint.
 */

import { ChildProcess, spawn } from "node:child_process";
import { createInterface, Interface } from "node:readline";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

const HERE = dirname(fileURLToPath(import.meta.url));
const SERVER = join(HERE, "..", "dist", "src", "serve.js");

class Client {
  proc: ChildProcess;
  reader: Interface;
  pending: ((line: string) => void)[] = [];
  buffered: string[] = [];
  nextId = 1;

  constructor() {
    this.proc = spawn("node", [SERVER], { stdio: ["pipe", "pipe", "inherit"] });
    this.reader = createInterface({ input: this.proc.stdout! });
    this.reader.on("line", (line) => {
      const waiter = this.pending.shift();
      if (waiter) waiter(line);
      else this.buffered.push(line);
    });
  }

  readLine(timeoutMs = 60_000): Promise<string> {
    const line = this.buffered.shift();
    if (line !== undefined) return Promise.resolve(line);
    return new Promise((resolve, reject) => {
      const timer = setTimeout(() => reject(new Error("timed out waiting for line")), timeoutMs);
      this.pending.push((l) => {
        clearTimeout(timer);
        resolve(l);
      });
    });
  }

  sendRaw(text: string): void {
    this.proc.stdin!.write(text + "\n");
  }

  async request(texts: string[]): Promise<any> {
    const id = this.nextId++;
    this.sendRaw(JSON.stringify({ id, texts }));
    return JSON.parse(await this.readLine());
  }

  close(): void {
    this.proc.stdin!.end();
    this.proc.kill();
  }
}

describe("scorer sidecar", () => {
  let client: Client;
  let handshake: any;

  beforeAll(async () => {
    client = new Client();
    handshake = JSON.parse(await client.readLine());
  }, 120_000);

  afterAll(() => {
    client.close();
  });

  it("greets with the protocol handshake and declares its token convention", () => {
    expect(handshake.hello).toBe("viseme-scorer");
    expect(handshake.version).toBe(1);
    expect(handshake.tokens).toBe("words+eos");
  });

  it("answers requests in order with matching ids and arity", async () => {
    const first = await client.request(["EXCUSE ME"]);
    const second = await client.request(["HOW ARE YOU", "THANK YOU"]);
    expect(second.id).toBe(first.id + 1);
    expect(first.ppl).toHaveLength(1);
    expect(second.ppl).toHaveLength(2);
  });

  it("rejects an empty texts array with the protocol error", async () => {
    const response = await client.request([]);
    expect(response.error).toBe("empty");
    expect(response.ppl).toBeUndefined();
  });

  it("answers malformed requests with an error and keeps serving", async () => {
    client.sendRaw("{broken json");
    const errorResponse = JSON.parse(await client.readLine());
    expect(errorResponse.error).toMatch(/malformed/);
    const after = await client.request(["HELLO"]);
    expect(after.ppl[0]).toBeGreaterThan(1);
  });

  it("rejects non-string texts without dying", async () => {
    const id = client.nextId++;
    client.sendRaw(JSON.stringify({ id, texts: [42] }));
    const response = JSON.parse(await client.readLine());
    expect(response.id).toBe(id);
    expect(response.error).toMatch(/texts/);
  });

  it("is deterministic across repeated identical requests", async () => {
    const a = await client.request(["NICE TO MEET YOU", "I AM SORRY"]);
    const b = await client.request(["NICE TO MEET YOU", "I AM SORRY"]);
    expect(a.ppl).toEqual(b.ppl);
  });

  it("prefers grammatical word order: PP(EXCUSE ME) < PP(ME EXCUSE)", async () => {
    const { ppl } = await client.request(["EXCUSE ME", "ME EXCUSE"]);
    expect(ppl[0]).toBeLessThan(ppl[1]);
  });

  it("scores reference sentences finite and above 1", async () => {
    const sentences = [
      "EXCUSE ME",
      "I AM SORRY",
      "I LOVE THIS GAME",
      "WHEN THERE ISN'T MUCH ELSE IN THE GARDEN",
      "OVER THE COURSE OF HIS LIFE",
      "BUT NOW WE HAVE THESE VIRUSES",
      "PRETTY ON THE OUTSIDE",
      "STICK TO WHAT YOU'RE GOOD AT",
    ];
    const { ppl } = await client.request(sentences);
    for (const pp of ppl) {
      expect(Number.isFinite(pp)).toBe(true);
      expect(pp).toBeGreaterThan(1);
    }
    // informational (checkpoint-specific, not gated): published reference
    // perplexity for EXCUSE ME was 5.3
    const ratio = ppl[0] / 5.3;
    console.error(
      `info: PP("EXCUSE ME") = ${ppl[0].toFixed(2)} (${ratio.toFixed(2)}x the published 5.3;` +
        ` within +-50%: ${ratio > 0.5 && ratio < 1.5})`
    );
  });

  it("prefers grammatical order on twenty corpus sentences vs reversals", async () => {
    const { readFileSync } = await import("node:fs");
    const corpus = join(HERE, "..", "..", "src", "visemedecode", "data", "corpus_small.txt");
    const sentences = readFileSync(corpus, "utf-8")
      .split("\n")
      .map((l) => l.toUpperCase().replace(/[^A-Z']+/g, " ").trim())
      .filter((l) => l.split(" ").length >= 4)
      .slice(0, 20);
    expect(sentences).toHaveLength(20);
    const scrambled = sentences.map((s) => s.split(" ").reverse().join(" "));
    const straight = await client.request(sentences);
    const reversed = await client.request(scrambled);
    for (let i = 0; i < sentences.length; i++) {
      expect(straight.ppl[i], sentences[i]).toBeLessThan(reversed.ppl[i]);
    }
  });
});
