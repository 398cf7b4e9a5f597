import { readFileSync, readdirSync } from "node:fs";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";
import { describe, expect, it } from "vitest";
import { renderPrompt, templateText } from "../src/templates.js";
import { parseInstances } from "../src/runner.js";
import {
  InstanceRecord,
  MissingField,
  Variant,
  instanceId,
  variantName,
} from "../src/types.js";

const FIXTURES = join(
  dirname(fileURLToPath(import.meta.url)),
  "..",
  "fixtures",
);
const GOLDENS = join(FIXTURES, "goldens");

const VARIANTS: Variant[] = [
  { kind: "no_cot" },
  { kind: "cot" },
  { kind: "word_limit", cotLen: 50 },
  { kind: "word_limit", cotLen: 100 },
  { kind: "word_limit", cotLen: 200 },
  { kind: "algorithmic" },
];

function fixtures(): InstanceRecord[] {
  return parseInstances(
    readFileSync(join(FIXTURES, "instances.jsonl"), "utf8"),
  );
}

describe("golden prompts", () => {
  it("renders every fixture instance byte-equal to its golden file", () => {
    const records = fixtures();
    expect(records.length).toBeGreaterThan(0);
    let checked = 0;
    for (const rec of records) {
      for (const variant of VARIANTS) {
        const golden = readFileSync(
          join(GOLDENS, `${instanceId(rec)}.${variantName(variant)}.txt`),
        );
        expect(Buffer.from(renderPrompt(rec, variant), "utf8").equals(golden))
          .toBe(true);
        checked += 1;
      }
    }
    expect(checked).toBe(records.length * VARIANTS.length);
  });

  it("has no stray golden files", () => {
    const expected = new Set(
      fixtures().flatMap((rec) =>
        VARIANTS.map((v) => `${instanceId(rec)}.${variantName(v)}.txt`),
      ),
    );
    for (const name of readdirSync(GOLDENS)) {
      expect(expected.has(name)).toBe(true);
    }
  });
});

describe("renderPrompt", () => {
  const majority: InstanceRecord = {
    problem: "majority",
    n: 3,
    seed: 0,
    truth: true,
    payload: { bits: [1, 0, 1] },
  };

  it("joins majority bits with commas between the bit markers", () => {
    const prompt = renderPrompt(majority, { kind: "no_cot" });
    expect(prompt).toContain("<|bits|>\n1,0,1\n<|end bits|>");
    expect(prompt).not.toContain("cot:");
  });

  it("word-limit variant states the exact word budget", () => {
    const prompt = renderPrompt(majority, { kind: "word_limit", cotLen: 50 });
    expect(prompt).toContain(
      "cot: Using exactly 50 words, solve the problem step by step.",
    );
  });

  it("cot variant asks for step-by-step reasoning", () => {
    expect(renderPrompt(majority, { kind: "cot" })).toContain(
      "cot: Think step by step.",
    );
  });

  it("renders reachability edges as u->v with 0-based node labels", () => {
    const rec: InstanceRecord = {
      problem: "reachability",
      n: 3,
      seed: 0,
      truth: true,
      payload: {
        n: 3,
        edges: [
          [1, 2],
          [2, 3],
        ],
        source: 1,
        target: 3,
      },
    };
    const prompt = renderPrompt(rec, { kind: "cot" });
    expect(prompt).toContain("edges=0->1,1->2\n");
    expect(prompt).toContain("source=0\n");
    expect(prompt).toContain("target=2\n");
    expect(prompt).toContain("nodes labeled 0..n-1");
  });

  it("renders the match3 data block fields", () => {
    const rec: InstanceRecord = {
      problem: "match3",
      n: 3,
      seed: 0,
      truth: false,
      payload: { m: 7, target: 4, list: [1, 5, 6] },
    };
    const prompt = renderPrompt(rec, { kind: "no_cot" });
    expect(prompt).toContain("<|data|>\nm=7\nlist=1,5,6\ntarget=4\n<|end data|>");
  });

  it("raises MissingField when the payload lacks a needed field", () => {
    const broken: InstanceRecord = { ...majority, payload: {} };
    expect(() => renderPrompt(broken, { kind: "cot" })).toThrow(MissingField);
  });

  it("algorithmic reachability drops the input-format block for the procedure", () => {
    const text = templateText("reachability", { kind: "algorithmic" });
    expect(text).toContain(
      "cot: Walk meticulously through the BFS/DFS steps and visited set evolution.",
    );
    expect(text).not.toContain("Input format:");
  });
});
