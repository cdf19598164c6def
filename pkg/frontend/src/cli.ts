#!/usr/bin/env node
/** render --kind {tradeoff,lifetime} --in <csv> --out <img> */

import { readFileSync, writeFileSync } from "node:fs";
import { parseArgs } from "node:util";

import { FigureKind, SchemaError, render } from "./render.js";

export function main(argv: string[]): number {
  let args;
  try {
    args = parseArgs({
      args: argv,
      allowPositionals: true,
      options: {
        kind: { type: "string" },
        in: { type: "string" },
        out: { type: "string" },
      },
    });
  } catch (error) {
    console.error(`error: ${(error as Error).message}`);
    return 2;
  }
  const [command] = args.positionals;
  if (command !== "render") {
    console.error("usage: coopcsma-render render --kind {tradeoff,lifetime} --in <csv> --out <img>");
    return 2;
  }
  const kind = args.values.kind;
  const input = args.values.in;
  const output = args.values.out;
  if (!kind || !input || !output) {
    console.error("error: render requires --kind, --in, and --out");
    return 2;
  }
  if (kind !== "tradeoff" && kind !== "lifetime") {
    console.error(`error: unknown figure kind "${kind}"`);
    return 2;
  }
  let text: string;
  try {
    text = readFileSync(input, "utf-8");
  } catch (error) {
    console.error(`error: cannot read ${input}: ${(error as Error).message}`);
    return 2;
  }
  try {
    const image = render({ kind: kind as FigureKind, input: text, source: input });
    writeFileSync(output, image);
  } catch (error) {
    if (error instanceof SchemaError) {
      console.error(`schema error: ${error.message}`);
      return 2;
    }
    throw error;
  }
  return 0;
}

const invokedDirectly =
  process.argv[1] !== undefined && import.meta.url === new URL(`file://${process.argv[1]}`).href;
if (invokedDirectly) {
  process.exit(main(process.argv.slice(2)));
}
