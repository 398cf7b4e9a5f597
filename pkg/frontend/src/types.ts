import { z } from "zod";

/** One generated problem instance, as emitted (one JSON object per line)
 * by the corpus generator CLI (`bapo gen`). */
export const InstanceRecordSchema = z.object({
  problem: z.enum(["majority", "match3", "reachability"]),
  n: z.number().int().positive(),
  seed: z.number().int().nonnegative(),
  truth: z.boolean(),
  payload: z.record(z.string(), z.unknown()),
});

export type InstanceRecord = z.infer<typeof InstanceRecordSchema>;

export function instanceId(rec: InstanceRecord): string {
  return `${rec.problem}-n${rec.n}-seed${rec.seed}`;
}

export type Problem = InstanceRecord["problem"];

export type Variant =
  | { kind: "no_cot" }
  | { kind: "cot" }
  | { kind: "word_limit"; cotLen: number }
  | { kind: "algorithmic" };

export function variantName(v: Variant): string {
  return v.kind === "word_limit" ? `word_limit_${v.cotLen}` : v.kind;
}

export function parseVariant(name: string): Variant {
  if (name === "no_cot" || name === "cot" || name === "algorithmic") {
    return { kind: name };
  }
  const m = /^word_limit_(\d+)$/.exec(name);
  if (m) return { kind: "word_limit", cotLen: Number(m[1]) };
  throw new Error(`unknown variant ${JSON.stringify(name)}`);
}

/** Structured-output answer shapes, per problem.  The boolean field name
 * differs by problem; the cot field is present on every reasoning variant. */
export const ANSWER_FIELD: Record<Problem, string> = {
  majority: "has_majority_1s",
  match3: "has_match3",
  reachability: "is_reachable",
};

export function answerSchema(problem: Problem, withCot: boolean) {
  const bool = { [ANSWER_FIELD[problem]]: z.boolean() };
  return withCot
    ? z.object({ cot: z.string(), ...bool })
    : z.object(bool);
}

/** A provider's reply to one prompt. */
export interface ProviderResponse {
  /** JSON text conforming to the answer schema for the instance's problem. */
  text: string;
  /** Reasoning-token count from provider usage metadata, when available. */
  reasoningTokens?: number;
  model: string;
}

export interface Provider {
  readonly model: string;
  complete(prompt: string, schemaFields: string[]): Promise<ProviderResponse>;
}

/** One scored row of a results file. */
export const RunResultSchema = z.object({
  instance_id: z.string(),
  problem: z.enum(["majority", "match3", "reachability"]),
  n: z.number().int(),
  model: z.string(),
  variant: z.string(),
  predicted: z.boolean().nullable(),
  truth: z.boolean(),
  correct: z.boolean(),
  reasoning_tokens: z.number().int().nonnegative(),
  token_source: z.enum(["usage", "counted", "none"]),
  cot_text: z.string().optional(),
  error: z.string().optional(),
});

export type RunResult = z.infer<typeof RunResultSchema>;

export class MissingField extends Error {}
export class EmptyInput extends Error {}
export class ProviderError extends Error {}
