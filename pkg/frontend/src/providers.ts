import {
  Provider,
  ProviderError,
  ProviderResponse,
} from "./types.js";

/** Offline mock providers plus an env-configured live HTTP provider.
 * The mocks work purely from the prompt text (they parse the data block and
 * solve the instance), so the runner treats them exactly like a remote
 * model. */

function answerField(schemaFields: string[]): string {
  const field = schemaFields.find((f) => f !== "cot");
  if (field === undefined) {
    throw new ProviderError("schema has no boolean answer field");
  }
  return field;
}

interface ParsedInstance {
  answer: boolean;
  size: number;
}

/** Parse the data block out of a rendered prompt and solve it. */
export function solveFromPrompt(prompt: string): ParsedInstance {
  const bits = /<\|bits\|>\n([^\n]*)\n<\|end bits\|>/.exec(prompt);
  if (bits && bits[1] !== undefined) {
    const values = bits[1].split(",").map(Number);
    const ones = values.filter((b) => b === 1).length;
    return { answer: 2 * ones > values.length, size: values.length };
  }
  const match3 = /\nm=(\d+)\nlist=([^\n]*)\ntarget=(\d+)\n/.exec(prompt);
  if (match3) {
    const m = Number(match3[1]);
    const values = (match3[2] ?? "").split(",").map(Number);
    const target = Number(match3[3]);
    const present = new Set(values);
    const answer = values.some((v) => present.has((((target - v) % m) + m) % m));
    return { answer, size: values.length };
  }
  const reach = /\nn=(\d+)\nedges=([^\n]*)\nsource=(\d+)\ntarget=(\d+)\n/.exec(
    prompt,
  );
  if (reach) {
    const n = Number(reach[1]);
    const source = Number(reach[3]);
    const target = Number(reach[4]);
    const out = new Map<number, number[]>();
    for (const part of (reach[2] ?? "").split(",")) {
      const edge = /^(\d+)->(\d+)$/.exec(part);
      if (!edge) continue;
      const u = Number(edge[1]);
      const v = Number(edge[2]);
      if (!out.has(u)) out.set(u, []);
      out.get(u)!.push(v);
    }
    const seen = new Set<number>([source]);
    const queue = [source];
    while (queue.length > 0) {
      const u = queue.shift()!;
      for (const v of out.get(u) ?? []) {
        if (!seen.has(v)) {
          seen.add(v);
          queue.push(v);
        }
      }
    }
    return { answer: seen.has(target), size: n };
  }
  throw new ProviderError("prompt has no recognizable data block");
}

function reply(
  model: string,
  fields: string[],
  answer: boolean,
  cot?: string,
): ProviderResponse {
  const body: Record<string, unknown> = {};
  if (fields.includes("cot")) body["cot"] = cot ?? "";
  body[answerField(fields)] = answer;
  return { text: JSON.stringify(body), model };
}

/** Always answers correctly (parses and solves the prompt). */
export function truthEchoProvider(model = "mock-truth"): Provider {
  return {
    model,
    async complete(prompt, schemaFields) {
      const { answer } = solveFromPrompt(prompt);
      return reply(model, schemaFields, answer, "solved directly.");
    },
  };
}

/** Always answers false; accuracy 0.5 exactly on balanced corpora. */
export function constantFalseProvider(model = "mock-false"): Provider {
  return {
    model,
    async complete(prompt, schemaFields) {
      return reply(model, schemaFields, false, "defaulting to False.");
    },
  };
}

/** Answers correctly and emits a cot of exactly round(slope*n + intercept)
 * whitespace-separated words, for exercising token-scaling fits. */
export function linearTokenProvider(
  slope: number,
  intercept = 0,
  model = "mock-linear",
): Provider {
  return {
    model,
    async complete(prompt, schemaFields) {
      const { answer, size } = solveFromPrompt(prompt);
      const words = Math.max(1, Math.round(slope * size + intercept));
      const cot = Array.from({ length: words }, (_, i) => `w${i}`).join(" ");
      return reply(model, schemaFields, answer, cot);
    },
  };
}

/** Wraps a provider so its first `failures` calls per prompt throw; for
 * exercising retry logic. */
export function flakyProvider(inner: Provider, failures: number): Provider {
  const seen = new Map<string, number>();
  return {
    model: inner.model,
    async complete(prompt, schemaFields) {
      const count = (seen.get(prompt) ?? 0) + 1;
      seen.set(prompt, count);
      if (count <= failures) {
        throw new ProviderError(`transient failure ${count}/${failures}`);
      }
      return inner.complete(prompt, schemaFields);
    },
  };
}

/** Always fails; for exercising per-instance error capture. */
export function failingProvider(model = "mock-fail"): Provider {
  return {
    model,
    async complete() {
      throw new ProviderError("permanent failure");
    },
  };
}

/** Live chat-completions provider configured from the environment:
 * LLM_BENCH_API_URL, LLM_BENCH_API_KEY, LLM_BENCH_MODEL.  Expects an
 * OpenAI-compatible endpoint; asks for a JSON object with the schema's
 * fields and reads reasoning token usage when reported. */
export function liveProvider(): Provider {
  const url = process.env["LLM_BENCH_API_URL"];
  const key = process.env["LLM_BENCH_API_KEY"];
  const model = process.env["LLM_BENCH_MODEL"];
  if (!url || !key || !model) {
    throw new ProviderError(
      "live provider needs LLM_BENCH_API_URL, LLM_BENCH_API_KEY, LLM_BENCH_MODEL",
    );
  }
  return {
    model,
    async complete(prompt, schemaFields) {
      const response = await fetch(url, {
        method: "POST",
        headers: {
          "content-type": "application/json",
          authorization: `Bearer ${key}`,
        },
        body: JSON.stringify({
          model,
          messages: [{ role: "user", content: prompt }],
          response_format: { type: "json_object" },
        }),
      });
      if (!response.ok) {
        throw new ProviderError(`HTTP ${response.status}`);
      }
      const data = (await response.json()) as {
        choices?: { message?: { content?: string } }[];
        usage?: { completion_tokens_details?: { reasoning_tokens?: number } };
      };
      const text = data.choices?.[0]?.message?.content;
      if (typeof text !== "string") {
        throw new ProviderError("response has no message content");
      }
      void schemaFields;
      const reasoningTokens =
        data.usage?.completion_tokens_details?.reasoning_tokens;
      return reasoningTokens === undefined
        ? { text, model }
        : { text, model, reasoningTokens };
    },
  };
}
