#!/usr/bin/env node
/**
 * render --figure fig3a --ed ed.csv --sweep sweep.csv [--sweep more.csv]
 *        [--diag diag.csv] --out fig3a.svg
 *
 * Exit codes: 0 success, 1 usage error, 2 CSV/schema error (message names
 * the offending file and column).
 */

import { writeFileSync } from "node:fs";

import { CsvError } from "./csv.js";
import { FIGURE_IDS, FigureId, FigureSpec, render } from "./figures.js";

function usage(): string {
  return (
    "usage: render --figure <" +
    FIGURE_IDS.join("|") +
    "> [--ed ed.csv] [--sweep sweep.csv ...] [--diag diag.csv] --out out.svg"
  );
}

export function parseArgs(argv: string[]): FigureSpec {
  let figure: string | undefined;
  let ed: string | undefined;
  let diag: string | undefined;
  let out: string | undefined;
  const sweeps: string[] = [];
  for (let i = 0; i < argv.length; i++) {
    const a = argv[i];
    const next = (): string => {
      const v = argv[++i];
      if (v === undefined) throw new Error(`missing value for ${a}`);
      return v;
    };
    switch (a) {
      case "--figure":
        figure = next();
        break;
      case "--ed":
        ed = next();
        break;
      case "--sweep":
        sweeps.push(next());
        break;
      case "--diag":
        diag = next();
        break;
      case "--out":
        out = next();
        break;
      default:
        throw new Error(`unknown argument: ${a}`);
    }
  }
  if (!figure || !(FIGURE_IDS as readonly string[]).includes(figure)) {
    throw new Error(`--figure must be one of ${FIGURE_IDS.join(", ")}`);
  }
  if (!out) throw new Error("--out is required");
  return { figure: figure as FigureId, ed, sweeps, diag, out };
}

export function main(argv: string[]): number {
  let spec: FigureSpec;
  try {
    spec = parseArgs(argv);
  } catch (e) {
    console.error(`error: ${(e as Error).message}`);
    console.error(usage());
    return 1;
  }
  try {
    const svg = render(spec);
    writeFileSync(spec.out, svg);
    console.log(`wrote ${spec.out}`);
    return 0;
  } catch (e) {
    if (e instanceof CsvError) {
      console.error(`error: ${e.message}`);
      return 2;
    }
    throw e;
  }
}

if (process.argv[1] && process.argv[1].endsWith("cli.js")) {
  process.exit(main(process.argv.slice(2)));
}
