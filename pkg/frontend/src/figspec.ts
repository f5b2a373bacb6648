/**
 * FigureSpec: the small JSON document that drives the renderer.  Paths
 * inside a spec file (inputs, fits) are resolved relative to the spec's
 * own directory; the output path is resolved against the current
 * working directory so batch runs drop images where they are invoked.
 */

import { readFileSync } from "node:fs";
import { dirname, isAbsolute, resolve } from "node:path";
import { z } from "zod";

export const FIGURE_KINDS = [
  "spectrum-panels",
  "mx-vs-gamma",
  "chi-vs-gamma",
  "corr-and-entropy",
  "hermitian-comparison",
  "gap",
  "extrapolation",
] as const;

export type FigureKind = (typeof FIGURE_KINDS)[number];

const logAxesSchema = z
  .object({
    x: z.boolean().default(false),
    y: z.boolean().default(false),
  })
  .strict();

export const figureSpecSchema = z
  .object({
    kind: z.enum(FIGURE_KINDS),
    inputs: z
      .array(z.string().min(1))
      .min(1, "inputs must list at least one CSV path"),
    output: z.string().min(1),
    log_axes: logAxesSchema.default({ x: false, y: false }),
    /** Fit-result JSON files; log-log panels are annotated with the
     * fitted slopes and, where meaningful, the fitted line itself. */
    fits: z.array(z.string().min(1)).default([]),
    /** Critical point(s) used to fold the decay-strength axis into a
     * distance-to-transition axis: a scalar applies to every input, an
     * array pairs up with `inputs` entry by entry. */
    gamma_c: z.union([z.number(), z.array(z.number())]).optional(),
    title: z.string().optional(),
  })
  .strict()
  .superRefine((val, ctx) => {
    if (Array.isArray(val.gamma_c) && val.gamma_c.length !== val.inputs.length) {
      ctx.addIssue({
        code: z.ZodIssueCode.custom,
        path: ["gamma_c"],
        message:
          `lists ${val.gamma_c.length} values for ` +
          `${val.inputs.length} inputs`,
      });
    }
  });

export type FigureSpec = z.infer<typeof figureSpecSchema>;

export class FigureSpecError extends Error {
  constructor(message: string, readonly path: string) {
    super(`${path}: ${message}`);
    this.name = "FigureSpecError";
  }
}

function resolveFrom(base: string, p: string): string {
  return isAbsolute(p) ? p : resolve(base, p);
}

/** Read, validate, and path-resolve a figure spec document. */
export function loadFigureSpec(path: string): FigureSpec {
  let raw: string;
  try {
    raw = readFileSync(path, "utf8");
  } catch (err) {
    throw new FigureSpecError(`cannot read file: ${(err as Error).message}`, path);
  }
  let doc: unknown;
  try {
    doc = JSON.parse(raw);
  } catch (err) {
    throw new FigureSpecError(`not valid JSON: ${(err as Error).message}`, path);
  }
  const parsed = figureSpecSchema.safeParse(doc);
  if (!parsed.success) {
    const issues = parsed.error.issues
      .map((i) => `${i.path.join(".") || "(root)"}: ${i.message}`)
      .join("; ");
    throw new FigureSpecError(`invalid figure spec: ${issues}`, path);
  }
  const spec = parsed.data;
  const base = dirname(resolve(path));
  return {
    ...spec,
    inputs: spec.inputs.map((p) => resolveFrom(base, p)),
    fits: spec.fits.map((p) => resolveFrom(base, p)),
  };
}

/** Per-input critical points, broadcasting a scalar. */
export function resolveGammaC(spec: FigureSpec): Array<number | null> {
  if (spec.gamma_c === undefined) return spec.inputs.map(() => null);
  if (typeof spec.gamma_c === "number") {
    const v = spec.gamma_c;
    return spec.inputs.map(() => v);
  }
  if (spec.gamma_c.length !== spec.inputs.length) {
    throw new Error(
      `gamma_c lists ${spec.gamma_c.length} values for ` +
        `${spec.inputs.length} inputs`,
    );
  }
  return [...spec.gamma_c];
}
