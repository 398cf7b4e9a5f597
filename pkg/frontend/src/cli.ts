#!/usr/bin/env node
import { mkdir, writeFile } from "node:fs/promises";
import { join } from "node:path";
import { parseArgs } from "node:util";
import { pathToFileURL } from "node:url";
import {
  accuracyPlot,
  aggregate,
  toCsv,
  tokensPlot,
} from "./aggregate.js";
import {
  constantFalseProvider,
  linearTokenProvider,
  liveProvider,
  truthEchoProvider,
} from "./providers.js";
import {
  readInstances,
  readResults,
  runBatch,
  writeResults,
} from "./runner.js";
import { renderPrompt } from "./templates.js";
import {
  Provider,
  Variant,
  instanceId,
  parseVariant,
  variantName,
} from "./types.js";

const USAGE = `usage:
  llm-bench render --instances FILE --variant V [--out-dir DIR]
  llm-bench run --instances FILE --variant V --out FILE
                [--provider mock-truth|mock-false|mock-linear|live]
                [--concurrency N] [--retries N] [--resume]
  llm-bench aggregate --out-dir DIR RESULTS.jsonl [...]

variants: no_cot, cot, word_limit_{50,100,200}, algorithmic`;

const WORD_LIMITS = [50, 100, 200];

function getVariant(name: string | undefined): Variant {
  if (name === undefined) throw new Error("--variant is required");
  const variant = parseVariant(name);
  if (
    variant.kind === "word_limit" &&
    !WORD_LIMITS.includes(variant.cotLen)
  ) {
    throw new Error(`word limit must be one of ${WORD_LIMITS.join(", ")}`);
  }
  return variant;
}

function getProvider(name: string): Provider {
  switch (name) {
    case "mock-truth":
      return truthEchoProvider();
    case "mock-false":
      return constantFalseProvider();
    case "mock-linear":
      return linearTokenProvider(3);
    case "live":
      return liveProvider();
    default:
      throw new Error(`unknown provider ${JSON.stringify(name)}`);
  }
}

async function cmdRender(argv: string[]): Promise<number> {
  const { values } = parseArgs({
    args: argv,
    options: {
      instances: { type: "string" },
      variant: { type: "string" },
      "out-dir": { type: "string" },
    },
  });
  if (!values.instances) throw new Error("--instances is required");
  const variant = getVariant(values.variant);
  const records = await readInstances(values.instances);
  const outDir = values["out-dir"];
  if (outDir) await mkdir(outDir, { recursive: true });
  for (const rec of records) {
    const prompt = renderPrompt(rec, variant);
    if (outDir) {
      const name = `${instanceId(rec)}.${variantName(variant)}.txt`;
      await writeFile(join(outDir, name), prompt);
    } else {
      process.stdout.write(prompt + "\n");
    }
  }
  return 0;
}

async function cmdRun(argv: string[]): Promise<number> {
  const { values } = parseArgs({
    args: argv,
    options: {
      instances: { type: "string" },
      variant: { type: "string" },
      out: { type: "string" },
      provider: { type: "string", default: "mock-truth" },
      concurrency: { type: "string", default: "4" },
      retries: { type: "string", default: "2" },
      resume: { type: "boolean", default: false },
    },
  });
  if (!values.instances) throw new Error("--instances is required");
  if (!values.out) throw new Error("--out is required");
  const variant = getVariant(values.variant);
  const instances = await readInstances(values.instances);
  const resumeFrom = values.resume
    ? await readResults(values.out).catch(() => [])
    : [];
  const results = await runBatch({
    instances,
    provider: getProvider(values.provider ?? "mock-truth"),
    variant,
    concurrency: Number(values.concurrency),
    retries: Number(values.retries),
    resumeFrom,
  });
  await writeResults(values.out, results);
  const failed = results.filter((r) => r.error !== undefined).length;
  process.stdout.write(
    `wrote ${results.length} results (${failed} errors) to ${values.out}\n`,
  );
  return failed > 0 ? 1 : 0;
}

async function cmdAggregate(argv: string[]): Promise<number> {
  const { values, positionals } = parseArgs({
    args: argv,
    options: { "out-dir": { type: "string", default: "." } },
    allowPositionals: true,
  });
  const rows = (
    await Promise.all(positionals.map((path) => readResults(path)))
  ).flat();
  const agg = aggregate(rows);
  const outDir = values["out-dir"] ?? ".";
  await mkdir(outDir, { recursive: true });
  await writeFile(join(outDir, "aggregate.csv"), toCsv(agg));
  await writeFile(join(outDir, "accuracy_vs_n.svg"), accuracyPlot(agg));
  await writeFile(join(outDir, "tokens_vs_n.svg"), tokensPlot(agg));
  process.stdout.write(
    `wrote ${agg.length} aggregate rows to ${join(outDir, "aggregate.csv")}\n`,
  );
  return 0;
}

export async function main(argv: string[]): Promise<number> {
  const [command, ...rest] = argv;
  try {
    switch (command) {
      case "render":
        return await cmdRender(rest);
      case "run":
        return await cmdRun(rest);
      case "aggregate":
        return await cmdAggregate(rest);
      default:
        process.stderr.write(USAGE + "\n");
        return 2;
    }
  } catch (err) {
    process.stderr.write(`error: ${err instanceof Error ? err.message : err}\n`);
    return 2;
  }
}

const invokedDirectly =
  process.argv[1] !== undefined &&
  import.meta.url === pathToFileURL(process.argv[1]).href;
if (invokedDirectly) {
  process.stdout.on("error", (err: NodeJS.ErrnoException) => {
    if (err.code === "EPIPE") process.exit(0);
    throw err;
  });
  main(process.argv.slice(2)).then((code) => {
    process.exitCode = code;
  });
}
