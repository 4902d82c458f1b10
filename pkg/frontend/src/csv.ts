/**
 * Minimal CSV handling for the sweep files written by the sampler CLI:
 * a header row followed by comma-separated values with no quoting.
 */

export interface CsvTable {
  columns: string[];
  rows: Record<string, string>[];
}

export class CsvError extends Error {}

export function parseCsv(text: string): CsvTable {
  const lines = text
    .split(/\r?\n/)
    .map((l) => l.trim())
    .filter((l) => l.length > 0);
  if (lines.length === 0) {
    throw new CsvError("empty file: no header row");
  }
  const columns = lines[0].split(",");
  const rows = lines.slice(1).map((line) => {
    const cells = line.split(",");
    const row: Record<string, string> = {};
    columns.forEach((c, i) => {
      row[c] = cells[i] ?? "";
    });
    return row;
  });
  return { columns, rows };
}

/** Throw listing every missing column at once. */
export function requireColumns(table: CsvTable, needed: string[]): void {
  const missing = needed.filter((c) => !table.columns.includes(c));
  if (missing.length > 0) {
    throw new CsvError(`missing columns: ${missing.join(", ")}`);
  }
}

export function numeric(row: Record<string, string>, column: string): number {
  const value = Number(row[column]);
  if (!Number.isFinite(value)) {
    throw new CsvError(`non-numeric value ${JSON.stringify(row[column])} in column ${column}`);
  }
  return value;
}
