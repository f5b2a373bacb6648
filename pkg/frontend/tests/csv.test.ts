import { describe, expect, it } from "vitest";
import { CsvError, columnNumbers, parseQcpCsv } from "../src/csv.js";
import { detectSchema } from "../src/schemas.js";
import { fixtureText } from "./helpers.js";

describe("parseQcpCsv", () => {
  it("parses a sweep file: config echo, 15 columns, all rows", () => {
    const csv = parseQcpCsv(fixtureText("sweep_L4.csv"), "sweep_L4.csv");
    expect(csv.columns).toHaveLength(15);
    expect(csv.columns[0]).toBe("L");
    expect(csv.rows).toHaveLength(61);
    expect(csv.comment).toMatch(/^# config: /);
    expect(csv.config["L"]).toBe("4");
    expect(csv.config["steps"]).toBe("61");
    expect(csv.version).toBe("0.1.0");
    expect(detectSchema(csv.columns)).toBe("sweep");
  });

  it("parses a comment-free two-column table", () => {
    const csv = parseQcpCsv(fixtureText("gc_table.csv"), "gc_table.csv");
    expect(csv.comment).toBe("");
    expect(csv.version).toBeNull();
    expect(csv.columns).toEqual(["L", "gamma_c"]);
    expect(csv.rows).toHaveLength(13);
    expect(detectSchema(csv.columns)).toBe("gc-table");
  });

  it("rejects an empty file as missing its header", () => {
    expect(() => parseQcpCsv("", "empty.csv")).toThrowError(/missing header row/);
  });

  it("rejects a comment-only file as missing its header", () => {
    expect(() => parseQcpCsv("# config: a=1 | version: 0\n", "c.csv")).toThrowError(
      /missing header row/,
    );
  });

  it("reports truncation with the byte offset of the cut record", () => {
    const text = fixtureText("sweep_L4.csv");
    const cut = text.slice(0, text.length - 40); // mid-way through the last row
    let caught: CsvError | null = null;
    try {
      parseQcpCsv(cut, "cut.csv");
    } catch (err) {
      caught = err as CsvError;
    }
    expect(caught).toBeInstanceOf(CsvError);
    expect(caught?.message).toMatch(/truncated file/);
    expect(caught?.message).toMatch(/byte \d+/);
    expect(caught?.byteOffset).toBeGreaterThan(0);
    expect(caught?.byteOffset).toBeLessThan(cut.length);
  });

  it("reports ragged rows with their line number", () => {
    const text = "a,b,c\n1,2,3\n4,5\n";
    let caught: CsvError | null = null;
    try {
      parseQcpCsv(text, "ragged.csv");
    } catch (err) {
      caught = err as CsvError;
    }
    expect(caught).toBeInstanceOf(CsvError);
    expect(caught?.message).toMatch(/expected 3 fields, got 2/);
    expect(caught?.line).toBe(3);
  });

  it("keeps empty cells as nulls in numeric columns", () => {
    const text = "x,y\n1,\n2,5\n";
    const csv = parseQcpCsv(text, "holes.csv");
    expect(columnNumbers(csv, "y")).toEqual([null, 5]);
    expect(columnNumbers(csv, "x")).toEqual([1, 2]);
  });

  it("flags non-numeric cells when a column is read as numbers", () => {
    const text = "x\nnope\n";
    const csv = parseQcpCsv(text, "bad.csv");
    expect(() => columnNumbers(csv, "x")).toThrowError(/bad number in column "x"/);
  });

  it("reads IEEE specials the way the writer spells them", () => {
    const csv = parseQcpCsv("x\nnan\ninf\n-inf\n", "ieee.csv");
    const [a, b, c] = columnNumbers(csv, "x");
    expect(Number.isNaN(a)).toBe(true);
    expect(b).toBe(Infinity);
    expect(c).toBe(-Infinity);
  });

  it("names a column that does not exist", () => {
    const csv = parseQcpCsv("x\n1\n", "t.csv");
    expect(() => columnNumbers(csv, "z")).toThrowError(/no column named "z"/);
  });
});
