import { readFile, writeFile } from "node:fs/promises";
import { setTimeout as sleep } from "node:timers/promises";
import {
  ANSWER_FIELD,
  InstanceRecord,
  InstanceRecordSchema,
  Provider,
  RunResult,
  RunResultSchema,
  Variant,
  answerSchema,
  instanceId,
  variantName,
} from "./types.js";
import { renderPrompt } from "./templates.js";

/** Batched provider runs: bounded concurrency, retries with backoff,
 * per-instance error capture, and resume by instance id. */

export interface RunBatchOptions {
  instances: InstanceRecord[];
  provider: Provider;
  variant: Variant;
  /** Maximum in-flight provider calls (default 4). */
  concurrency?: number;
  /** Retries after the first attempt (default 2). */
  retries?: number;
  /** Base backoff delay, doubled per retry (default 250ms; 0 disables). */
  backoffMs?: number;
  /** Rows from a previous run; their instances are not re-queried. */
  resumeFrom?: RunResult[];
  onResult?: (result: RunResult) => void;
}

function countWhitespaceTokens(text: string): number {
  const words = text.split(/\s+/).filter((w) => w.length > 0);
  return words.length;
}

async function runOne(
  rec: InstanceRecord,
  opts: Required<Pick<RunBatchOptions, "provider" | "variant" | "retries" | "backoffMs">>,
): Promise<RunResult> {
  const { provider, variant } = opts;
  const withCot = variant.kind !== "no_cot";
  const field = ANSWER_FIELD[rec.problem];
  const schemaFields = withCot ? ["cot", field] : [field];
  const base = {
    instance_id: instanceId(rec),
    problem: rec.problem,
    n: rec.n,
    model: provider.model,
    variant: variantName(variant),
    truth: rec.truth,
  };

  let prompt: string;
  try {
    prompt = renderPrompt(rec, variant);
  } catch (err) {
    return {
      ...base,
      predicted: null,
      correct: false,
      reasoning_tokens: 0,
      token_source: "none",
      error: String(err),
    };
  }

  let lastError = "";
  for (let attempt = 0; attempt <= opts.retries; attempt++) {
    if (attempt > 0 && opts.backoffMs > 0) {
      await sleep(opts.backoffMs * 2 ** (attempt - 1));
    }
    try {
      const response = await provider.complete(prompt, schemaFields);
      const parsed = answerSchema(rec.problem, withCot).parse(
        JSON.parse(response.text),
      ) as Record<string, unknown>;
      const predicted = parsed[field] as boolean;
      const cot = withCot ? (parsed["cot"] as string) : undefined;
      let tokens: number;
      let source: RunResult["token_source"];
      if (response.reasoningTokens !== undefined) {
        tokens = response.reasoningTokens;
        source = "usage";
      } else if (cot !== undefined && cot.length > 0) {
        tokens = countWhitespaceTokens(cot);
        source = "counted";
      } else {
        tokens = 0;
        source = "none";
      }
      return {
        ...base,
        predicted,
        correct: predicted === rec.truth,
        reasoning_tokens: tokens,
        token_source: source,
        ...(cot !== undefined ? { cot_text: cot } : {}),
      };
    } catch (err) {
      lastError = String(err);
    }
  }
  return {
    ...base,
    predicted: null,
    correct: false,
    reasoning_tokens: 0,
    token_source: "none",
    error: lastError,
  };
}

export async function runBatch(options: RunBatchOptions): Promise<RunResult[]> {
  const concurrency = options.concurrency ?? 4;
  const retries = options.retries ?? 2;
  const backoffMs = options.backoffMs ?? 250;
  const done = new Map<string, RunResult>();
  for (const row of options.resumeFrom ?? []) {
    done.set(row.instance_id, row);
  }
  const pending = options.instances.filter(
    (rec) => !done.has(instanceId(rec)),
  );

  const results: RunResult[] = [...done.values()];
  let next = 0;
  const worker = async () => {
    while (next < pending.length) {
      const rec = pending[next++]!;
      const row = await runOne(rec, {
        provider: options.provider,
        variant: options.variant,
        retries,
        backoffMs,
      });
      results.push(row);
      options.onResult?.(row);
    }
  };
  await Promise.all(
    Array.from({ length: Math.max(1, concurrency) }, () => worker()),
  );
  results.sort((x, y) => x.instance_id.localeCompare(y.instance_id));
  return results;
}

export function parseInstances(text: string): InstanceRecord[] {
  return text
    .split("\n")
    .filter((line) => line.trim().length > 0)
    .map((line) => InstanceRecordSchema.parse(JSON.parse(line)));
}

export async function readInstances(path: string): Promise<InstanceRecord[]> {
  return parseInstances(await readFile(path, "utf8"));
}

export function parseResults(text: string): RunResult[] {
  return text
    .split("\n")
    .filter((line) => line.trim().length > 0)
    .map((line) => RunResultSchema.parse(JSON.parse(line)));
}

export async function readResults(path: string): Promise<RunResult[]> {
  return parseResults(await readFile(path, "utf8"));
}

export async function writeResults(
  path: string,
  rows: RunResult[],
): Promise<void> {
  const body = rows.map((row) => JSON.stringify(row)).join("\n");
  await writeFile(path, body.length > 0 ? body + "\n" : "");
}
