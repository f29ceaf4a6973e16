// Minimal reader for the harness CSVs: one header line, numeric rows,
// optional leading "# ..." comment lines (timestamp header).

export interface Table {
  header: string[];
  rows: number[][];
}

export function parseCsv(text: string): Table {
  const lines = text
    .split(/\r?\n/)
    .filter((line) => line.trim().length > 0 && !line.startsWith("#"));
  if (lines.length < 1) {
    throw new Error("CSV has no header line");
  }
  const header = lines[0].split(",").map((s) => s.trim());
  const rows: number[][] = [];
  for (let i = 1; i < lines.length; i++) {
    const tokens = lines[i].split(",");
    if (tokens.length !== header.length) {
      throw new Error(
        `CSV row ${i + 1} has ${tokens.length} fields, expected ${header.length}`,
      );
    }
    const row = tokens.map((token) => {
      const trimmed = token.trim();
      const value = Number(trimmed);
      if (Number.isNaN(value) && trimmed.toLowerCase() !== "nan") {
        throw new Error(`CSV row ${i + 1}: cannot parse ${trimmed!} as a number`);
      }
      return value;
    });
    rows.push(row);
  }
  return { header, rows };
}

export function column(table: Table, name: string): number[] {
  const index = table.header.indexOf(name);
  if (index < 0) {
    throw new Error(`CSV is missing the ${name} column`);
  }
  return table.rows.map((row) => row[index]);
}

/** 17 significant digits: round-trips IEEE doubles across languages. */
export function fmt(x: number): string {
  if (Number.isNaN(x)) return "nan";
  return Number(x.toPrecision(17)).toString();
}
