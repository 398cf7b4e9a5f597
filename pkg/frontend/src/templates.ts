import {
  InstanceRecord,
  MissingField,
  Problem,
  Variant,
} from "./types.js";

/** Prompt templates, one per (problem, variant).  The template text is the
 * contract: rendered prompts for fixture instances are pinned byte-for-byte
 * by golden files under fixtures/goldens/. */

const MAJORITY_HEAD = `<|instruction|>
Consider the given list of bits. Does it have a strict majority of 1s? Fill in the fields as follows:
`;

const MAJORITY_HEAD_ALGO = `<|instruction|>
Consider the given list of bits. Does it have a strict majority of 1s? To solve the problem, use the chain of thought (cot) field to count the number of 1s and the total length of the list one bit at a time.
Fill in the fields as follows:
`;

const MAJORITY_ANSWER = `has_majority_1s: True if the list of bits has strictly more 1s than 0s, otherwise False.
<|end instruction|>

<|bits|>
{bits}
<|end bits|>`;

const MATCH3_HEAD = `<|instruction|>
You are given:
- a modulus m,
- a list of integers modulo m,
- and a target integer modulo m.

Decide if there exist two integers from the list whose sum modulo m equals the target.
`;

const MATCH3_ALGO_EXPLANATION = `To solve the problem, use the chain of thought (cot) field to check for each integer i in the list whether (target - i) mod m is also in the list. If so, the answer is True, since i and (target - i) form a matching pair. If no such pair is found after checking all integers, the answer is False.
`;

const MATCH3_ANSWER = `has_match3: True if there exist a, b from the list such that (a + b) mod m == target; otherwise False.
<|end instruction|>

<|data|>
m={m}
list={list}
target={target}
<|end data|>`;

const REACH_HEAD = `<|instruction|>
You are given a directed graph as a list of edges, and two nodes: source and target.
Decide if target is reachable from source via a directed path.
`;

const REACH_INPUT_FORMAT = `Input format:
- n: number of nodes labeled 0..n-1
- edges: comma-separated list of u->v directed edges
- source: the start node
- target: the goal node
`;

const REACH_ALGO_EXPLANATION = `To solve the problem, use the chain of thought (cot) field to step through a search procedure (BFS/DFS): start from source, follow outgoing edges, mark visited nodes, and stop if you reach target. If target is visited, the answer is True; otherwise False.
`;

const REACH_ANSWER = `is_reachable: True if there exists a directed path from source to target; otherwise False.
<|end instruction|>

<|data|>
n={n}
edges={edges}
source={source}
target={target}
<|end data|>`;

const FIELDS_LINE = "Fill in the fields as follows:\n";

function cotLine(variant: Variant, algorithmic: string): string {
  switch (variant.kind) {
    case "no_cot":
      return "";
    case "cot":
      return "cot: Think step by step.\n";
    case "word_limit":
      return `cot: Using exactly ${variant.cotLen} words, solve the problem step by step.\n`;
    case "algorithmic":
      return algorithmic;
  }
}

export function templateText(problem: Problem, variant: Variant): string {
  const algo = variant.kind === "algorithmic";
  switch (problem) {
    case "majority": {
      const head = algo ? MAJORITY_HEAD_ALGO : MAJORITY_HEAD;
      const cot = cotLine(
        variant,
        "cot: Use this field to count the number of 1s and the total length of the list one bit at a time.\n",
      );
      return head + cot + MAJORITY_ANSWER;
    }
    case "match3": {
      const middle = algo
        ? MATCH3_ALGO_EXPLANATION + FIELDS_LINE
        : FIELDS_LINE;
      const cot = cotLine(
        variant,
        "cot: Check for each integer i in the list whether (target - i) mod m is also in the list, until a matching pair is found or all integers are checked.\n",
      );
      return MATCH3_HEAD + middle + cot + MATCH3_ANSWER;
    }
    case "reachability": {
      const middle = algo
        ? REACH_ALGO_EXPLANATION + FIELDS_LINE
        : REACH_INPUT_FORMAT + FIELDS_LINE;
      const cot = cotLine(
        variant,
        "cot: Walk meticulously through the BFS/DFS steps and visited set evolution.\n",
      );
      return REACH_HEAD + middle + cot + REACH_ANSWER;
    }
  }
}

function need<T>(payload: Record<string, unknown>, field: string): T {
  if (!(field in payload) || payload[field] === undefined) {
    throw new MissingField(`payload is missing field ${JSON.stringify(field)}`);
  }
  return payload[field] as T;
}

/** Placeholder values for one instance.  Node ids are shifted to 0-based to
 * match the prompt's "nodes labeled 0..n-1" contract (the corpus JSONL uses
 * 1-based node ids). */
function substitutions(rec: InstanceRecord): Record<string, string> {
  const p = rec.payload;
  switch (rec.problem) {
    case "majority": {
      const bits = need<number[]>(p, "bits");
      return { bits: bits.join(",") };
    }
    case "match3": {
      const list = need<number[]>(p, "list");
      return {
        m: String(need<number>(p, "m")),
        list: list.join(","),
        target: String(need<number>(p, "target")),
      };
    }
    case "reachability": {
      const edges = need<[number, number][]>(p, "edges");
      return {
        n: String(need<number>(p, "n")),
        edges: edges.map(([u, v]) => `${u - 1}->${v - 1}`).join(","),
        source: String(need<number>(p, "source") - 1),
        target: String(need<number>(p, "target") - 1),
      };
    }
  }
}

export function renderPrompt(rec: InstanceRecord, variant: Variant): string {
  const subs = substitutions(rec);
  return templateText(rec.problem, variant).replace(
    /\{(\w+)\}/g,
    (whole, name: string) => {
      const value = subs[name];
      if (value === undefined) {
        throw new MissingField(`no substitution for placeholder {${name}}`);
      }
      return value;
    },
  );
}
