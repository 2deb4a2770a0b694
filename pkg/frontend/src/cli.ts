#!/usr/bin/env node
/** plots <figure-kind> --in <file...> --out <image.svg>
 *  Exit codes: 0 success, 1 input/schema error, 2 usage error. */

import { readFileSync, writeFileSync } from "node:fs";
import { pathToFileURL } from "node:url";
import { InputError } from "./csv.js";
import { buildFigure } from "./figures.js";

export interface Args {
  kind: string;
  inputs: string[];
  out: string;
}

export function parseArgs(argv: string[]): Args {
  if (argv.length === 0) {
    throw new UsageError("usage: plots <figure-kind> --in <file...> --out <image.svg>");
  }
  const kind = argv[0];
  const inputs: string[] = [];
  let out = "";
  let i = 1;
  while (i < argv.length) {
    const a = argv[i];
    if (a === "--in") {
      i += 1;
      while (i < argv.length && !argv[i].startsWith("--")) {
        inputs.push(argv[i]);
        i += 1;
      }
    } else if (a === "--out") {
      i += 1;
      if (i >= argv.length) throw new UsageError("--out needs a path");
      out = argv[i];
      i += 1;
    } else {
      throw new UsageError(`unknown argument ${a}`);
    }
  }
  if (inputs.length === 0) throw new UsageError("at least one --in file required");
  if (!out) throw new UsageError("--out is required");
  return { kind, inputs, out };
}

export class UsageError extends Error {}

export function main(argv: string[]): number {
  let args: Args;
  try {
    args = parseArgs(argv);
  } catch (e) {
    console.error(`usage error: ${(e as Error).message}`);
    return 2;
  }
  try {
    const texts = args.inputs.map((p) => readFileSync(p, "utf8"));
    const svg = buildFigure(args.kind, texts);
    writeFileSync(args.out, svg);
    console.log(`wrote ${args.out}`);
    return 0;
  } catch (e) {
    if (e instanceof InputError) {
      console.error(`input error: ${e.message}`);
      return 1;
    }
    if ((e as NodeJS.ErrnoException).code === "ENOENT") {
      console.error(`input error: ${(e as Error).message}`);
      return 1;
    }
    throw e;
  }
}

const isMain =
  process.argv[1] !== undefined && import.meta.url === pathToFileURL(process.argv[1]).href;
if (isMain) {
  process.exit(main(process.argv.slice(2)));
}
