/** Readers for the harness's `#meta {...}` headed CSV artifacts. */

import { readFileSync } from "node:fs";

export interface Table {
  meta: Record<string, unknown>;
  header: string[];
  /** column name -> numeric values (non-numeric cells become NaN) */
  columns: Map<string, number[]>;
  /** raw string cells for non-numeric columns */
  raw: Map<string, string[]>;
  nRows: number;
}

export function readTable(path: string): Table {
  const text = readFileSync(path, "utf8");
  const lines = text.split(/\r?\n/).filter((l) => l.length > 0);
  if (lines.length === 0) {
    throw new Error(`${path}: empty file`);
  }
  let meta: Record<string, unknown> = {};
  let start = 0;
  if (lines[0].startsWith("#meta")) {
    meta = JSON.parse(lines[0].slice(5).trim());
    start = 1;
  }
  if (lines.length <= start) {
    throw new Error(`${path}: missing header row`);
  }
  const header = lines[start].split(",").map((h) => h.trim());
  const columns = new Map<string, number[]>(header.map((h) => [h, []]));
  const raw = new Map<string, string[]>(header.map((h) => [h, []]));
  let nRows = 0;
  for (let i = start + 1; i < lines.length; i++) {
    const cells = lines[i].split(",");
    if (cells.length !== header.length) {
      throw new Error(`${path}: row ${i + 1} has ${cells.length} cells, expected ${header.length}`);
    }
    header.forEach((h, j) => {
      columns.get(h)!.push(Number(cells[j]));
      raw.get(h)!.push(cells[j]);
    });
    nRows++;
  }
  if (nRows === 0) {
    throw new Error(`${path}: no data rows`);
  }
  return { meta, header, columns, raw, nRows };
}

export function requireColumns(t: Table, names: string[], path: string): void {
  for (const n of names) {
    if (!t.header.includes(n)) {
      throw new Error(`${path}: missing required column '${n}' (found: ${t.header.join(", ")})`);
    }
  }
}
