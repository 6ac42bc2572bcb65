/** Parsing for the drivephase CLI CSV format:
 *  optional leading `# config: {...}` lines, a header row, numeric rows.
 */

export interface Table {
  columns: string[];
  rows: number[][];
  configLine?: string;
}

export class CsvError extends Error {}

export function parseCsv(text: string): Table {
  const lines = text.split(/\r?\n/).filter((l) => l.length > 0);
  let configLine: string | undefined;
  let i = 0;
  while (i < lines.length && lines[i].startsWith("#")) {
    if (lines[i].startsWith("# config:")) {
      configLine = lines[i].slice("# config:".length).trim();
    }
    i += 1;
  }
  if (i >= lines.length) {
    throw new CsvError("empty input: no header row found");
  }
  const columns = lines[i].split(",").map((c) => c.trim());
  const rows: number[][] = [];
  for (let j = i + 1; j < lines.length; j++) {
    const parts = lines[j].split(",");
    if (parts.length !== columns.length) {
      throw new CsvError(
        `row ${j + 1}: expected ${columns.length} fields, got ${parts.length}`,
      );
    }
    const row = parts.map((p) => Number(p));
    if (row.some((v) => !Number.isFinite(v))) {
      throw new CsvError(`row ${j + 1}: non-numeric value`);
    }
    rows.push(row);
  }
  if (rows.length === 0) {
    throw new CsvError("empty input: no data rows");
  }
  return { columns, rows, configLine };
}

/** Column values by name; throws naming the missing column. */
export function column(table: Table, name: string): number[] {
  const k = table.columns.indexOf(name);
  if (k < 0) {
    throw new CsvError(
      `missing column "${name}" (have: ${table.columns.join(", ")})`,
    );
  }
  return table.rows.map((r) => r[k]);
}
