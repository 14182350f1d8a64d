/**
 * plot AGG_CSV -o IMAGE [--logx | --no-logx] [--title T] [--mechanisms A,B]
 *
 * Reads a sweep aggregate CSV and writes a deterministic SVG chart. The x
 * axis is log-scaled by default; --no-logx switches to linear (--logx is
 * accepted to make the default explicit).
 */

import { readFileSync, writeFileSync } from "node:fs";
import { pathToFileURL } from "node:url";

import { parseAggCsv } from "./csv.js";
import { PlotSpec, render } from "./render.js";

export function main(argv: string[]): number {
  let input: string | undefined;
  let output: string | undefined;
  let logX = true;
  let title: string | undefined;
  let mechanisms: string[] | undefined;

  for (let i = 0; i < argv.length; i++) {
    const arg = argv[i];
    if (arg === "-o" || arg === "--output") {
      output = argv[++i];
    } else if (arg === "--logx") {
      logX = true;
    } else if (arg === "--no-logx") {
      logX = false;
    } else if (arg === "--title") {
      title = argv[++i];
    } else if (arg === "--mechanisms") {
      mechanisms = (argv[++i] ?? "").split(",").filter((s) => s.length > 0);
    } else if (arg.startsWith("-")) {
      console.error(`unknown option ${arg}`);
      return 2;
    } else if (input === undefined) {
      input = arg;
    } else {
      console.error(`unexpected argument ${arg}`);
      return 2;
    }
  }
  if (!input || !output) {
    console.error(
      "usage: plot AGG_CSV -o IMAGE [--logx | --no-logx] [--title T] [--mechanisms A,B]",
    );
    return 2;
  }
  const spec: PlotSpec = { logX, title, mechanisms };
  const rows = parseAggCsv(readFileSync(input, "utf8"));
  writeFileSync(output, render(rows, spec));
  console.log(`wrote ${output}`);
  return 0;
}

const isDirectRun =
  process.argv[1] !== undefined &&
  import.meta.url === pathToFileURL(process.argv[1]).href;
if (isDirectRun) {
  process.exit(main(process.argv.slice(2)));
}
