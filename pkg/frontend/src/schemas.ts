/**
 * Column schemas of the qcpchain CSV files this package consumes.
 *
 * Every file starts with a single `# config: ... | version: ...` comment
 * line (optional for hand-maintained tables), then a header row, then
 * data rows.  Floats are serialized in full double precision, so cells
 * of numeric columns must parse as finite numbers; empty cells mark
 * observables that were deselected for the run.
 */

export const SWEEP_COLUMNS = [
  "L", "omega", "gamma_re", "gamma_im", "e0_re", "e0_im", "rule",
  "overlap_prev", "mx", "my", "mz", "nup", "chi", "gap", "svn_half",
] as const;

export const SPECTRUM_COLUMNS = [
  "L", "omega", "gamma_re", "gamma_im", "e_re", "e_im",
] as const;

export const CORR_COLUMNS = ["L", "gamma", "n", "value"] as const;
export const CORR_XI_COLUMNS = [...CORR_COLUMNS, "xi"] as const;

export const ENTROPY_COLUMNS = [
  "L", "omega", "gamma_re", "gamma_im", "cut", "svn",
] as const;

/** Two-column table of critical points per chain length, the input of
 * the infinite-size extrapolation fit. */
export const GC_TABLE_COLUMNS = ["L", "gamma_c"] as const;

export type SchemaKind =
  | "sweep"
  | "spectrum"
  | "corr"
  | "entropy"
  | "gc-table"
  | "unknown";

/** Columns that hold free-form strings rather than numbers. */
const TEXT_COLUMNS = new Set(["rule"]);

const KNOWN: ReadonlyArray<[SchemaKind, ReadonlyArray<string>]> = [
  ["sweep", SWEEP_COLUMNS],
  ["spectrum", SPECTRUM_COLUMNS],
  ["corr", CORR_COLUMNS],
  ["corr", CORR_XI_COLUMNS],
  ["entropy", ENTROPY_COLUMNS],
  ["gc-table", GC_TABLE_COLUMNS],
];

/** Match a header row against the known schemas (exact column sequence;
 * the corr schema is accepted with or without its optional xi column). */
export function detectSchema(columns: ReadonlyArray<string>): SchemaKind {
  const key = columns.join(",");
  for (const [kind, cols] of KNOWN) {
    if (cols.join(",") === key) return kind;
  }
  return "unknown";
}

export function isTextColumn(name: string): boolean {
  return TEXT_COLUMNS.has(name);
}

/** Column sequences a schema kind may legitimately carry. */
export function schemaColumns(kind: SchemaKind): ReadonlyArray<ReadonlyArray<string>> {
  return KNOWN.filter(([k]) => k === kind).map(([, cols]) => cols);
}
