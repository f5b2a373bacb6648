/**
 * Reader for the deterministic CSV dialect written by the qcpchain CLI:
 * optional leading `#` comment lines (the last one echoes the run
 * config), one header row, comma-separated data rows, `\n` terminators,
 * UTF-8.  Structural defects are reported with the 1-based line number
 * and the byte offset where the offending record starts.
 */

import { Buffer } from "node:buffer";
import Papa from "papaparse";

export class CsvError extends Error {
  constructor(
    message: string,
    readonly path: string,
    readonly line: number,
    readonly byteOffset: number,
  ) {
    super(`${path}:${line} (byte ${byteOffset}): ${message}`);
    this.name = "CsvError";
  }
}

export interface ParsedCsv {
  path: string;
  /** Last leading comment line, "" when the file has none. */
  comment: string;
  /** key/value pairs parsed out of a `# config: ...` comment. */
  config: Record<string, string>;
  /** Tool version echoed in the comment, null when absent. */
  version: string | null;
  columns: string[];
  /** Raw string cells, one array per data row, header excluded. */
  rows: string[][];
  /** 1-based line number of the first data row (for error reporting). */
  firstDataLine: number;
}

const CONFIG_PREFIX = "# config: ";
const VERSION_SEP = " | version: ";

function parseConfigComment(comment: string): {
  config: Record<string, string>;
  version: string | null;
} {
  if (!comment.startsWith(CONFIG_PREFIX)) return { config: {}, version: null };
  const body = comment.slice(CONFIG_PREFIX.length);
  const sep = body.lastIndexOf(VERSION_SEP);
  const pairs = sep >= 0 ? body.slice(0, sep) : body;
  const version = sep >= 0 ? body.slice(sep + VERSION_SEP.length) : null;
  const config: Record<string, string> = {};
  for (const token of pairs.split(" ")) {
    const eq = token.indexOf("=");
    if (eq > 0) config[token.slice(0, eq)] = token.slice(eq + 1);
  }
  return { config, version };
}

/** Split into lines, remembering each line's starting byte offset. */
function lineOffsets(text: string): { lines: string[]; offsets: number[] } {
  const lines = text.split("\n");
  const offsets: number[] = [];
  let at = 0;
  for (const line of lines) {
    offsets.push(at);
    at += Buffer.byteLength(line, "utf8") + 1; // +1 for the newline
  }
  return { lines, offsets };
}

export function parseQcpCsv(text: string, path = "<csv>"): ParsedCsv {
  const { lines, offsets } = lineOffsets(text);
  const totalBytes = Buffer.byteLength(text, "utf8");

  // A well-formed file ends with a newline, so the final split element
  // is empty; a non-empty tail means the last record was cut mid-write.
  const last = lines.length - 1;
  const lastLine = lines[last] ?? "";
  if (lastLine !== "") {
    throw new CsvError(
      `truncated file: record starting at byte ${offsets[last]} is cut ` +
        `off at byte ${totalBytes} (no trailing newline)`,
      path,
      last + 1,
      offsets[last] ?? 0,
    );
  }

  let i = 0;
  let comment = "";
  while (i < lines.length && (lines[i] ?? "").startsWith("#")) {
    comment = lines[i] as string;
    i += 1;
  }
  if (i >= last || (lines[i] ?? "").trim() === "") {
    throw new CsvError("missing header row", path, i + 1, offsets[i] ?? totalBytes);
  }

  const headerLine = i;
  const block = lines.slice(headerLine, last).join("\n");
  const parsed = Papa.parse<string[]>(block, {
    delimiter: ",",
    newline: "\n",
    skipEmptyLines: false,
  });
  for (const err of parsed.errors) {
    const row = err.row ?? 0;
    const lineNo = headerLine + row + 1;
    throw new CsvError(err.message, path, lineNo, offsets[lineNo - 1] ?? 0);
  }

  const records = parsed.data;
  const columns = records[0] ?? [];
  if (columns.length === 0 || columns.every((c) => c.trim() === "")) {
    throw new CsvError("missing header row", path, headerLine + 1, offsets[headerLine] ?? 0);
  }

  const rows: string[][] = [];
  for (let r = 1; r < records.length; r += 1) {
    const rec = records[r] as string[];
    const lineNo = headerLine + r + 1;
    if (rec.length === 1 && rec[0] === "") continue; // blank line
    if (rec.length !== columns.length) {
      throw new CsvError(
        `expected ${columns.length} fields, got ${rec.length}`,
        path,
        lineNo,
        offsets[lineNo - 1] ?? 0,
      );
    }
    rows.push(rec);
  }

  const { config, version } = parseConfigComment(comment);
  return {
    path,
    comment,
    config,
    version,
    columns,
    rows,
    firstDataLine: headerLine + 2,
  };
}

/** Parse one numeric cell.  The writer serializes IEEE specials the
 * way Python prints them (`nan`, `inf`, `-inf`); those are legal cell
 * values meaning "undefined at this grid point" and come back as
 * NaN/±Infinity for the caller to filter.  Unparseable text returns
 * undefined. */
export function parseNumericCell(cell: string): number | undefined {
  switch (cell) {
    case "nan":
      return NaN;
    case "inf":
      return Infinity;
    case "-inf":
      return -Infinity;
    default: {
      const value = Number(cell);
      return Number.isNaN(value) ? undefined : value;
    }
  }
}

/** Read one column as numbers, skipping empty cells; `null` marks a
 * skipped row so callers can keep rows aligned across columns. */
export function columnNumbers(csv: ParsedCsv, name: string): Array<number | null> {
  const idx = csv.columns.indexOf(name);
  if (idx < 0) {
    throw new CsvError(
      `no column named ${JSON.stringify(name)}`,
      csv.path,
      csv.firstDataLine - 1,
      0,
    );
  }
  return csv.rows.map((row, r) => {
    const cell = row[idx] ?? "";
    if (cell === "") return null;
    const value = parseNumericCell(cell);
    if (value === undefined) {
      throw new CsvError(
        `bad number in column ${JSON.stringify(name)}: ${JSON.stringify(cell)}`,
        csv.path,
        csv.firstDataLine + r,
        0,
      );
    }
    return value;
  });
}
