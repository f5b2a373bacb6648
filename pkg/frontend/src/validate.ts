/**
 * Schema validation for qcpchain CSV output: detect which documented
 * schema a file follows, check every cell, and echo the embedded run
 * config.  Structural defects (missing header, truncation, ragged
 * rows) raise CsvError; content problems are collected in the report
 * so a caller can list them all at once.
 */

import { readFileSync } from "node:fs";
import { CsvError, parseNumericCell, parseQcpCsv, type ParsedCsv } from "./csv.js";
import { detectSchema, isTextColumn, type SchemaKind } from "./schemas.js";

export interface CsvReport {
  path: string;
  kind: SchemaKind;
  columns: string[];
  rowCount: number;
  /** Raw `# config` comment line, "" when the file has none. */
  comment: string;
  config: Record<string, string>;
  version: string | null;
  ok: boolean;
  problems: string[];
}

function checkCells(csv: ParsedCsv, problems: string[]): void {
  const numericIdx = csv.columns
    .map((name, idx) => ({ name, idx }))
    .filter(({ name }) => !isTextColumn(name));
  for (let r = 0; r < csv.rows.length; r += 1) {
    const row = csv.rows[r] as string[];
    for (const { name, idx } of numericIdx) {
      const cell = row[idx] ?? "";
      if (cell === "") continue; // deselected observable
      if (parseNumericCell(cell) === undefined) {
        problems.push(
          `line ${csv.firstDataLine + r}: bad number in column ` +
            `${JSON.stringify(name)}: ${JSON.stringify(cell)}`,
        );
        return; // first defect is enough; files are machine-written
      }
    }
  }
}

export function validateParsed(csv: ParsedCsv, expect?: SchemaKind): CsvReport {
  const problems: string[] = [];
  const kind = detectSchema(csv.columns);
  if (kind === "unknown") {
    problems.push(
      `header matches no known schema: ${csv.columns.join(",")}`,
    );
  } else if (expect !== undefined && kind !== expect) {
    problems.push(
      `schema mismatch: header matches ${JSON.stringify(kind)}, ` +
        `expected ${JSON.stringify(expect)}`,
    );
  }
  if (kind !== "unknown") checkCells(csv, problems);
  return {
    path: csv.path,
    kind,
    columns: [...csv.columns],
    rowCount: csv.rows.length,
    comment: csv.comment,
    config: csv.config,
    version: csv.version,
    ok: problems.length === 0,
    problems,
  };
}

export function validateCsv(path: string, expect?: SchemaKind): CsvReport {
  let text: string;
  try {
    text = readFileSync(path, "utf8");
  } catch (err) {
    throw new CsvError(
      `cannot read file: ${(err as Error).message}`,
      path,
      0,
      0,
    );
  }
  return validateParsed(parseQcpCsv(text, path), expect);
}

export function formatReport(report: CsvReport): string {
  const lines = [
    `file:    ${report.path}`,
    `schema:  ${report.kind}`,
    `columns: ${report.columns.length} (${report.columns.join(", ")})`,
    `rows:    ${report.rowCount}`,
    `config:  ${report.comment || "(none)"}`,
  ];
  if (report.problems.length === 0) {
    lines.push("status:  ok");
  } else {
    lines.push("status:  INVALID");
    for (const p of report.problems) lines.push(`  - ${p}`);
  }
  return lines.join("\n");
}
