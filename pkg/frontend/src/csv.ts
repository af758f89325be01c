/** Reader for the solver's diagnostics CSV format:
 *  '# key = value' metadata lines, a header row, numeric rows. */

export interface Table {
  path: string;
  meta: Record<string, string>;
  columns: string[];
  rows: number[][];
}

export class CsvError extends Error {}

export function parseCsv(text: string, path = "<memory>"): Table {
  const meta: Record<string, string> = {};
  let columns: string[] | null = null;
  const rows: number[][] = [];
  for (const raw of text.split(/\r?\n/)) {
    const line = raw.trim();
    if (!line) continue;
    if (line.startsWith("#")) {
      const body = line.slice(1).trim();
      const eq = body.indexOf("=");
      if (eq >= 0) meta[body.slice(0, eq).trim()] = body.slice(eq + 1).trim();
      continue;
    }
    if (columns === null) {
      columns = line.split(",").map((c) => c.trim());
      continue;
    }
    const vals = line.split(",").map(Number);
    if (vals.some((v) => Number.isNaN(v))) {
      throw new CsvError(`${path}: non-numeric data row: ${line}`);
    }
    if (vals.length !== columns.length) {
      throw new CsvError(
        `${path}: row has ${vals.length} fields, header has ${columns.length}`,
      );
    }
    rows.push(vals);
  }
  if (columns === null) throw new CsvError(`${path}: no header row found`);
  if (rows.length === 0) throw new CsvError(`${path}: empty series (no data rows)`);
  return { path, meta, columns, rows };
}

export function column(table: Table, name: string): number[] {
  const idx = table.columns.indexOf(name);
  if (idx < 0) {
    throw new CsvError(
      `${table.path}: missing column '${name}' (have: ${table.columns.join(", ")})`,
    );
  }
  return table.rows.map((r) => r[idx]);
}

export function hasColumn(table: Table, name: string): boolean {
  return table.columns.includes(name);
}
