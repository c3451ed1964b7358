/**
 * Minimal CSV reading for the simulator's output files: comma-separated,
 * header row, no quoting, empty cells meaning "no value".
 */

export interface Table {
  columns: string[];
  rows: Record<string, number | null>[];
}

export class MissingColumnsError extends Error {
  constructor(
    public readonly file: string,
    public readonly missing: string[],
    public readonly expected: string[],
  ) {
    super(
      `${file}: missing column(s) ${missing.join(", ")}; ` +
        `expected columns: ${expected.join(", ")}`,
    );
  }
}

export function parseCsv(text: string): Table {
  const lines = text.trim().split(/\r?\n/);
  const header = lines[0];
  if (!header) {
    return { columns: [], rows: [] };
  }
  const columns = header.split(",");
  const rows = lines.slice(1).map((line) => {
    const cells = line.split(",");
    const row: Record<string, number | null> = {};
    columns.forEach((name, i) => {
      const cell = cells[i] ?? "";
      if (cell === "") {
        row[name] = null;
      } else {
        const value = Number(cell);
        row[name] = Number.isNaN(value) ? null : value;
      }
    });
    return row;
  });
  return { columns, rows };
}

/** Validate that `table` carries every column a figure needs. */
export function requireColumns(
  file: string,
  table: Table,
  expected: string[],
): void {
  const missing = expected.filter((c) => !table.columns.includes(c));
  if (missing.length > 0) {
    throw new MissingColumnsError(file, missing, expected);
  }
}
