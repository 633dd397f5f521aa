/**
 * Strict CSV reading for the simulation toolkit's output schemas.
 *
 * The parser is deliberately rigid: headers must match the documented
 * schemas exactly, every error names the offending file (and column, for
 * schema mismatches), and no physics is recomputed here.
 */

export class CsvError extends Error {}

export interface CsvTable {
  readonly path: string;
  readonly header: string[];
  readonly rows: string[][];
}

export function parseCsv(text: string, path: string): CsvTable {
  const lines = text.split(/\r?\n/).filter((l) => l.length > 0);
  if (lines.length === 0) {
    throw new CsvError(`empty CSV file: ${path}`);
  }
  const header = lines[0].split(",");
  const rows = lines.slice(1).map((line, i) => {
    const cells = line.split(",");
    if (cells.length !== header.length) {
      throw new CsvError(
        `${path}:${i + 2}: expected ${header.length} fields, got ${cells.length}`,
      );
    }
    return cells;
  });
  return { path, header, rows };
}

/** Assert the header matches `expected` exactly, naming the first offending column. */
export function requireHeader(table: CsvTable, expected: string[]): void {
  const n = Math.max(table.header.length, expected.length);
  for (let i = 0; i < n; i++) {
    if (table.header[i] !== expected[i]) {
      const got = table.header[i] ?? "<missing>";
      const want = expected[i] ?? "<none>";
      throw new CsvError(
        `${table.path}: schema mismatch in column ${i + 1}: ` +
          `expected "${want}", got "${got}"`,
      );
    }
  }
}

function num(table: CsvTable, row: number, col: number): number {
  const raw = table.rows[row][col];
  const v = Number(raw);
  if (raw.trim() === "" || Number.isNaN(v) && raw.trim().toLowerCase() !== "nan") {
    throw new CsvError(
      `${table.path}:${row + 2}: column "${table.header[col]}" is not numeric: "${raw}"`,
    );
  }
  return v;
}

export const ED_HEADER = ["temperature_K", "sz_over_hbar_exact"];
export const SWEEP_HEADER = [
  "temperature_K",
  "sz_over_hbar",
  "std_error",
  "model",
  "order",
  "n_samples",
  "seed",
];
export const DIAG_HEADER = ["temperature_K", "criterion", "mode"];

export interface EdPoint {
  T: number;
  sz: number;
}

export interface SweepPoint {
  T: number;
  sz: number;
  err: number;
  model: string;
  order: number;
}

export interface DiagPoint {
  T: number;
  value: number;
  mode: string;
}

export function readEd(text: string, path: string): EdPoint[] {
  const table = parseCsv(text, path);
  requireHeader(table, ED_HEADER);
  return table.rows.map((_, i) => ({ T: num(table, i, 0), sz: num(table, i, 1) }));
}

export function readSweep(text: string, path: string): SweepPoint[] {
  const table = parseCsv(text, path);
  requireHeader(table, SWEEP_HEADER);
  return table.rows.map((_, i) => ({
    T: num(table, i, 0),
    sz: num(table, i, 1),
    err: num(table, i, 2),
    model: table.rows[i][3],
    order: num(table, i, 4),
  }));
}

export function readDiag(text: string, path: string): DiagPoint[] {
  const table = parseCsv(text, path);
  requireHeader(table, DIAG_HEADER);
  return table.rows.map((_, i) => ({
    T: num(table, i, 0),
    value: num(table, i, 1),
    mode: table.rows[i][2],
  }));
}
