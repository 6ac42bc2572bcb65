/** CLI: render <input.csv> <kind> <output.svg>
 *
 * Reads a drivephase CLI CSV, writes a deterministic SVG. Inputs are never
 * modified; identical inputs produce byte-identical outputs.
 */
import { readFileSync, writeFileSync } from "node:fs";
import { parseCsv, CsvError } from "./csv.js";
import { FIGURE_KINDS, renderFigure } from "./figures.js";

export function render(csvPath: string, kind: string, outPath: string): void {
  const table = parseCsv(readFileSync(csvPath, "utf8"));
  writeFileSync(outPath, renderFigure(kind, table), "utf8");
}

function main(argv: string[]): number {
  if (argv.length !== 3) {
    process.stderr.write(
      `usage: render <input.csv> <${FIGURE_KINDS.join("|")}> <output.svg>\n`,
    );
    return 2;
  }
  const [csvPath, kind, outPath] = argv;
  try {
    render(csvPath, kind, outPath);
  } catch (err) {
    if (err instanceof CsvError) {
      process.stderr.write(`error: ${err.message}\n`);
      return 2;
    }
    process.stderr.write(`error: ${String(err)}\n`);
    return 1;
  }
  return 0;
}

if (process.argv[1] && process.argv[1].endsWith("render.js")) {
  process.exit(main(process.argv.slice(2)));
}
