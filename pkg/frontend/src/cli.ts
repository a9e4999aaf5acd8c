#!/usr/bin/env node
/**
 * Plot CLI: `plot --spec figure.json` renders a stored figure spec, or the
 * spec fields can be given directly as flags:
 *
 *   plot --kind line-snr --csv sweep.csv --out sweep.svg --estimators c-ml,nc-ml
 *   plot --kind polar-surface --csv surface.csv --out ratio.svg --metric ratio
 */

import { readFileSync } from "node:fs";
import { fileURLToPath } from "node:url";

import { SchemaError } from "./csv.js";
import { FigureSpecError } from "./figure.js";
import { render } from "./index.js";

function parseArgs(argv: string[]): Record<string, string | boolean> {
  const out: Record<string, string | boolean> = {};
  for (let i = 0; i < argv.length; i++) {
    const token = argv[i];
    if (!token.startsWith("--")) {
      throw new FigureSpecError(`unexpected argument ${token}`);
    }
    const eq = token.indexOf("=");
    if (eq >= 0) {
      out[token.slice(2, eq)] = token.slice(eq + 1);
    } else if (i + 1 < argv.length && !argv[i + 1].startsWith("--")) {
      out[token.slice(2)] = argv[++i];
    } else {
      out[token.slice(2)] = true;
    }
  }
  return out;
}

export function main(argv: string[]): number {
  try {
    const args = parseArgs(argv);
    let raw: Record<string, unknown>;
    if (typeof args.spec === "string") {
      raw = JSON.parse(readFileSync(args.spec, "utf-8")) as Record<string, unknown>;
    } else {
      raw = {
        kind: args.kind,
        csv: args.csv,
        out: args.out,
        param: args.param,
        metric: args.metric,
      };
      if (typeof args.estimators === "string") {
        raw.estimators = args.estimators.split(",").filter((s) => s.length > 0);
      }
      if (args["no-crb"] === true) raw.crbOverlay = false;
      if (args["linear-y"] === true) raw.logY = false;
    }
    const path = render(raw);
    console.log(`wrote ${path}`);
    return 0;
  } catch (error) {
    if (error instanceof FigureSpecError || error instanceof SchemaError) {
      console.error(`error: ${error.message}`);
      return 2;
    }
    console.error(`error: ${error instanceof Error ? error.message : String(error)}`);
    return 1;
  }
}

if (process.argv[1] && fileURLToPath(import.meta.url) === process.argv[1]) {
  process.exit(main(process.argv.slice(2)));
}
