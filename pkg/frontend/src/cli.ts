#!/usr/bin/env node
/**
 * Render figures from a simulator results CSV.
 *
 * Usage:
 *   node dist/cli.js --kind heatmap --in results.csv --out fig.svg \
 *     [--miner 1] [--value mean|ci] [--boundary profit,fair] \
 *     [--model concurrent|conventional] [--k 2] [--x m1|m2|R] [--title ...]
 *
 * Exit codes: 0 success, 2 bad flags or malformed CSV.
 */

import { readFileSync } from "node:fs";

import { CsvError, parseResults } from "./csv.js";
import { Boundary, PlotError, PlotKind, render } from "./plots.js";

function parseArgs(argv: string[]): Map<string, string> {
  const out = new Map<string, string>();
  for (let i = 0; i < argv.length; i++) {
    const arg = argv[i]!;
    if (!arg.startsWith("--")) fail(`unexpected argument ${arg}`);
    const value = argv[i + 1];
    if (value === undefined || value.startsWith("--")) {
      fail(`flag ${arg} needs a value`);
    }
    out.set(arg.slice(2), value!);
    i++;
  }
  return out;
}

function fail(message: string): never {
  process.stderr.write(`minesim-plots: ${message}\n`);
  process.exit(2);
}

export function main(argv: string[]): void {
  const args = parseArgs(argv);
  const input = args.get("in") ?? fail("--in is required");
  const out = args.get("out") ?? fail("--out is required");
  const kind = (args.get("kind") ?? "heatmap") as PlotKind;
  if (!["heatmap", "contour", "line"].includes(kind)) {
    fail(`unknown kind ${kind}`);
  }
  const boundaries = (args.get("boundary") ?? "")
    .split(",")
    .filter((b) => b !== "") as Boundary[];
  for (const b of boundaries) {
    if (b !== "profit" && b !== "fair") fail(`unknown boundary ${b}`);
  }

  let text: string;
  try {
    text = readFileSync(input, "utf-8");
  } catch (err) {
    fail(`cannot read ${input}: ${(err as Error).message}`);
  }
  try {
    const rows = parseResults(text);
    render(rows, {
      kind,
      miner: Number(args.get("miner") ?? "1"),
      value: args.get("value") as "mean" | "ci" | undefined,
      x: args.get("x") as "m1" | "m2" | "m3" | "R" | undefined,
      boundaries,
      model: args.get("model"),
      k: args.has("k") ? Number(args.get("k")) : undefined,
      title: args.get("title"),
      out,
    });
  } catch (err) {
    if (err instanceof CsvError || err instanceof PlotError) {
      fail(err.message);
    }
    throw err;
  }
  process.stderr.write(`wrote ${out}\n`);
}

main(process.argv.slice(2));
