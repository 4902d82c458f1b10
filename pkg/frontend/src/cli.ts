#!/usr/bin/env node
/**
 * Figure rendering for the sampler's CSV sweep outputs.
 *
 * Usage:
 *   fermigibbs-plots render --kind gap_vs_u --in usweep.csv --out usweep.svg [--log-y]
 *
 * Exit codes: 0 on success, 2 on bad arguments, missing columns or empty input.
 */

import { CsvError } from "./csv.js";
import { FigureKind, figureKinds, render } from "./render.js";

function usage(): string {
  return (
    "usage: fermigibbs-plots render --kind <" +
    figureKinds().join("|") +
    "> --in <csv> --out <svg> [--log-y]"
  );
}

export async function main(argv: string[]): Promise<number> {
  if (argv[0] !== "render") {
    console.error(usage());
    return 2;
  }
  let kind: string | undefined;
  let input: string | undefined;
  let output: string | undefined;
  let logY = false;
  const args = argv.slice(1);
  for (let i = 0; i < args.length; i += 1) {
    const a = args[i];
    if (a === "--kind") kind = args[++i];
    else if (a === "--in") input = args[++i];
    else if (a === "--out") output = args[++i];
    else if (a === "--log-y") logY = true;
    else {
      console.error(`unknown argument ${a}\n${usage()}`);
      return 2;
    }
  }
  if (!kind || !input || !output) {
    console.error(usage());
    return 2;
  }
  if (!figureKinds().includes(kind as FigureKind)) {
    console.error(`unknown figure kind ${kind}; expected one of ${figureKinds().join(", ")}`);
    return 2;
  }
  try {
    await render({ kind: kind as FigureKind, input, output, logY });
  } catch (err) {
    if (err instanceof CsvError) {
      console.error(`error: ${err.message}`);
      return 2;
    }
    if (err instanceof Error && "code" in err && err.code === "ENOENT") {
      console.error(`error: cannot read ${input}`);
      return 2;
    }
    throw err;
  }
  console.log(`wrote ${output}`);
  return 0;
}

const invokedDirectly =
  process.argv[1] !== undefined && import.meta.url === `file://${process.argv[1]}`;
if (invokedDirectly) {
  main(process.argv.slice(2)).then((code) => {
    process.exitCode = code;
  });
}
