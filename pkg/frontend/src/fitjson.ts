/**
 * Fit-result JSON documents written by the sweep tool's `fit`
 * subcommand.  The renderer uses them to annotate log-log panels with
 * fitted slopes and to draw fitted power-law lines.
 */

import { readFileSync } from "node:fs";
import { z } from "zod";

export const fitResultSchema = z
  .object({
    kind: z.string(),
    value: z.number(),
    amplitude: z.number(),
    window: z.tuple([z.number(), z.number()]),
    normr: z.number(),
    points_used: z.number().int(),
    low_confidence: z.boolean(),
    meta: z.record(z.string(), z.unknown()).default({}),
    version: z.string(),
  })
  .strict();

export type FitResult = z.infer<typeof fitResultSchema>;

export class FitJsonError extends Error {
  constructor(message: string, readonly path: string) {
    super(`${path}: ${message}`);
    this.name = "FitJsonError";
  }
}

export function loadFit(path: string): FitResult {
  let raw: string;
  try {
    raw = readFileSync(path, "utf8");
  } catch (err) {
    throw new FitJsonError(`cannot read file: ${(err as Error).message}`, path);
  }
  let doc: unknown;
  try {
    doc = JSON.parse(raw);
  } catch (err) {
    throw new FitJsonError(`not valid JSON: ${(err as Error).message}`, path);
  }
  const parsed = fitResultSchema.safeParse(doc);
  if (!parsed.success) {
    const issues = parsed.error.issues
      .map((i) => `${i.path.join(".") || "(root)"}: ${i.message}`)
      .join("; ");
    throw new FitJsonError(`invalid fit result: ${issues}`, path);
  }
  return parsed.data;
}

/** Greek label for a fit kind's exponent, used in annotations. */
export function exponentLabel(kind: string): string {
  switch (kind) {
    case "beta":
      return "β";
    case "gamma":
      return "γ";
    case "nu":
      return "ν";
    case "xi":
      return "ξ";
    case "gc-extrapolation":
      return "p";
    default:
      return kind;
  }
}
