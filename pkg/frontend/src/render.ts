#!/usr/bin/env node
/** CLI: validate a simulator CSV or render it to SVG.
 *
 *   render-figure validate --kind survival_curve --in curve.csv
 *   render-figure render --kind phase_boundary --in boundary.csv \
 *       --out boundary.svg [--lambda-c 0.86 | --estimate phase_estimate.json]
 */

import { readFileSync, writeFileSync } from "node:fs";
import { HEADERS, validateCsv, type CsvKind } from "./csv.js";
import { FIGURES, FigureError, phaseBoundaryFigure, type FigureKind } from "./figures.js";

function parseArgs(argv: string[]): { command: string; options: Map<string, string> } {
  const [command, ...rest] = argv;
  const options = new Map<string, string>();
  for (let i = 0; i < rest.length; i += 2) {
    const flag = rest[i];
    if (!flag.startsWith("--") || i + 1 >= rest.length) {
      throw new FigureError(`malformed option near ${JSON.stringify(flag)}`);
    }
    options.set(flag.slice(2), rest[i + 1]);
  }
  return { command, options };
}

function need(options: Map<string, string>, flag: string): string {
  const value = options.get(flag);
  if (value === undefined) throw new FigureError(`missing required --${flag}`);
  return value;
}

export function main(argv: string[]): number {
  let parsedArgs;
  try {
    parsedArgs = parseArgs(argv);
  } catch (err) {
    console.error(String(err instanceof Error ? err.message : err));
    return 2;
  }
  const { command, options } = parsedArgs;
  try {
    if (command === "validate") {
      const kind = need(options, "kind") as CsvKind;
      if (!(kind in HEADERS)) throw new FigureError(`unknown csv kind ${JSON.stringify(kind)}`);
      const result = validateCsv(kind, readFileSync(need(options, "in"), "utf8"));
      if (!result.ok) {
        console.error(result.errors.join("\n"));
        return 1;
      }
      console.log(`${result.rows.length} rows ok`);
      return 0;
    }
    if (command === "render") {
      const kind = need(options, "kind") as FigureKind;
      if (!(kind in FIGURES)) throw new FigureError(`unknown figure kind ${JSON.stringify(kind)}`);
      const csv = readFileSync(need(options, "in"), "utf8");
      let svg: string;
      if (kind === "phase_boundary") {
        let lambdaC: number | undefined;
        if (options.has("lambda-c")) {
          lambdaC = Number(options.get("lambda-c"));
        } else if (options.has("estimate")) {
          const estimate = JSON.parse(readFileSync(options.get("estimate")!, "utf8"));
          lambdaC = estimate.lambda_c_inf_hat ?? undefined;
        }
        svg = phaseBoundaryFigure(csv, lambdaC);
      } else {
        svg = FIGURES[kind](csv);
      }
      writeFileSync(need(options, "out"), svg);
      return 0;
    }
    throw new FigureError(`unknown command ${JSON.stringify(command ?? "")}; use validate|render`);
  } catch (err) {
    if (err instanceof FigureError) {
      console.error(err.message);
      return err.message.startsWith("invalid ") ? 1 : 2;
    }
    if (err instanceof Error && "code" in err) {
      console.error(err.message);
      return 3; // filesystem failure
    }
    throw err;
  }
}

if (process.argv[1] && import.meta.url.endsWith(process.argv[1].split("/").at(-1)!)) {
  process.exit(main(process.argv.slice(2)));
}
