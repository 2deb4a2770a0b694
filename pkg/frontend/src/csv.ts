/** Reader for the experiment result format: one header line naming
 *  columns, comma-separated numeric rows (strings allowed in the identity
 *  suite's check column). */

export interface Table {
  columns: string[];
  rows: Record<string, number | string>[];
}

export class InputError extends Error {}

export function parseCsv(text: string): Table {
  const lines = text
    .split(/\r?\n/)
    .map((l) => l.trim())
    .filter((l) => l.length > 0);
  if (lines.length === 0) {
    throw new InputError("empty input file");
  }
  const columns = lines[0].split(",").map((c) => c.trim());
  if (columns.length === 0 || columns.some((c) => c.length === 0)) {
    throw new InputError("malformed header line");
  }
  const rows: Record<string, number | string>[] = [];
  for (const line of lines.slice(1)) {
    const parts = line.split(",");
    if (parts.length !== columns.length) {
      throw new InputError(
        `row has ${parts.length} fields, header has ${columns.length}`,
      );
    }
    const row: Record<string, number | string> = {};
    columns.forEach((c, i) => {
      const raw = parts[i].trim();
      const num = Number(raw);
      row[c] = raw !== "" && Number.isFinite(num) ? num : raw;
    });
    rows.push(row);
  }
  if (rows.length === 0) {
    throw new InputError("no data rows");
  }
  return { columns, rows };
}

export function requireColumns(table: Table, needed: string[]): void {
  const missing = needed.filter((c) => !table.columns.includes(c));
  if (missing.length > 0) {
    throw new InputError(`input missing columns: ${missing.join(", ")}`);
  }
}

export function numeric(table: Table, column: string): number[] {
  return table.rows.map((r) => {
    const v = r[column];
    if (typeof v !== "number") {
      throw new InputError(`non-numeric value in column ${column}`);
    }
    return v;
  });
}
