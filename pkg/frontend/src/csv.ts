/** Numeric CSV tables as produced by the estimation harness. */

import { parse } from "csv-parse/sync";

import { EmptyTableError, MissingColumnError } from "./errors.js";

export interface Table {
  columns: string[];
  /** Row-major numeric data, one entry per column per row. */
  rows: number[][];
}

/** Parse a header + numeric-rows CSV string. */
export function parseTable(text: string): Table {
  let records: string[][];
  try {
    // length mismatches are reported below with the header for context
    records = parse(text, {
      skip_empty_lines: true,
      trim: true,
      relax_column_count: true,
    });
  } catch (err) {
    throw new EmptyTableError(`unreadable CSV: ${(err as Error).message}`);
  }
  if (records.length === 0) {
    throw new EmptyTableError("CSV holds no rows at all");
  }
  const columns = records[0]!;
  if (records.length === 1) {
    throw new EmptyTableError("CSV holds a header but no data rows");
  }
  const rows = records.slice(1).map((cells, i) => {
    if (cells.length !== columns.length) {
      throw new EmptyTableError(
        `row ${i + 2} has ${cells.length} cells, header has ${columns.length}`,
      );
    }
    return cells.map((cell, j) => {
      const v = Number(cell);
      if (!Number.isFinite(v)) {
        throw new EmptyTableError(
          `row ${i + 2}, column "${columns[j]}": not a finite number: "${cell}"`,
        );
      }
      return v;
    });
  });
  return { columns, rows };
}

/** Values of one named column, top to bottom. */
export function column(table: Table, name: string): number[] {
  const k = table.columns.indexOf(name);
  if (k < 0) {
    throw new MissingColumnError(name, table.columns);
  }
  return table.rows.map((row) => row[k]!);
}

/** Names matching a prefix/suffix pattern like abs_err_theta{i}_deg. */
export function seriesColumns(
  table: Table,
  prefix: string,
  suffix: string,
): string[] {
  return table.columns.filter(
    (c) => c.startsWith(prefix) && c.endsWith(suffix),
  );
}
