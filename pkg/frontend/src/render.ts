/**
 * Figure assembly: turn a FigureSpec plus qcpchain CSV/JSON files into
 * a deterministic SVG document.  Pure post-processing — inputs are
 * opened read-only and never modified.
 */

import { existsSync, mkdirSync, readFileSync, writeFileSync } from "node:fs";
import { basename, dirname, resolve } from "node:path";
import { columnNumbers, parseQcpCsv, type ParsedCsv } from "./csv.js";
import { resolveGammaC, type FigureSpec } from "./figspec.js";
import { exponentLabel, loadFit, type FitResult } from "./fitjson.js";
import {
  drawPanel,
  powerLawLine,
  RenderError,
  seriesColor,
  type Box,
  type Series,
} from "./plot.js";
import { detectSchema, schemaColumns, type SchemaKind } from "./schemas.js";
import { Svg } from "./svg.js";

export { RenderError } from "./plot.js";

const PANEL_W = 380;
const PANEL_H = 300;

interface LoadedInput {
  path: string;
  name: string;
  csv: ParsedCsv;
  kind: SchemaKind;
  gammaC: number | null;
}

function loadInputs(spec: FigureSpec): LoadedInput[] {
  const gcs = resolveGammaC(spec);
  return spec.inputs.map((path, i) => {
    if (!existsSync(path)) {
      throw new RenderError(`input not found: ${path}`);
    }
    const csv = parseQcpCsv(readFileSync(path, "utf8"), path);
    return {
      path,
      name: basename(path),
      csv,
      kind: detectSchema(csv.columns),
      gammaC: gcs[i] ?? null,
    };
  });
}

/** Column accessor that names the missing column in its error, so a
 * schema mismatch is reported in terms of what the figure needs. */
function numbers(input: LoadedInput, col: string, figKind: string): Array<number | null> {
  if (!input.csv.columns.includes(col)) {
    throw new RenderError(
      `missing column ${JSON.stringify(col)} in ${input.name} ` +
        `(required for ${figKind})`,
    );
  }
  return columnNumbers(input.csv, col);
}

/** Aligned (x, y) pairs from two columns, rows with gaps dropped. */
function pairs(
  input: LoadedInput,
  xcol: string,
  ycol: string,
  figKind: string,
): Array<[number, number]> {
  const xs = numbers(input, xcol, figKind);
  const ys = numbers(input, ycol, figKind);
  const out: Array<[number, number]> = [];
  for (let i = 0; i < xs.length; i += 1) {
    const x = xs[i];
    const y = ys[i];
    if (x !== null && y !== null && x !== undefined && y !== undefined) {
      out.push([x, y]);
    }
  }
  return out;
}

function requireKind(input: LoadedInput, want: SchemaKind, figKind: string): void {
  if (input.kind === want) return;
  const wanted = schemaColumns(want)[0] ?? [];
  const missing = wanted.filter((c) => !input.csv.columns.includes(c));
  if (missing.length > 0) {
    throw new RenderError(
      `missing column${missing.length > 1 ? "s" : ""} ` +
        `${missing.map((c) => JSON.stringify(c)).join(", ")} in ` +
        `${input.name} (required for ${figKind})`,
    );
  }
  throw new RenderError(
    `${input.name}: header matches ${JSON.stringify(input.kind)} but ` +
      `${figKind} needs a ${want} CSV`,
  );
}

/** Label a series by the chain length recorded in the file. */
function chainLabel(input: LoadedInput): string {
  const idx = input.csv.columns.indexOf("L");
  const cell = idx >= 0 ? input.csv.rows[0]?.[idx] : undefined;
  return cell !== undefined && cell !== "" ? `L=${Number(cell)}` : input.name;
}

/** Group row indices by the exact text of one column. */
function groupByColumn(csv: ParsedCsv, col: string): Map<string, number[]> {
  const idx = csv.columns.indexOf(col);
  const groups = new Map<string, number[]>();
  csv.rows.forEach((row, r) => {
    const key = row[idx] ?? "";
    const bucket = groups.get(key);
    if (bucket) bucket.push(r);
    else groups.set(key, [r]);
  });
  return groups;
}

function panelGrid(n: number, title?: string): { svg: Svg; boxes: Box[] } {
  const cols = n <= 2 ? n : n <= 4 ? 2 : 3;
  const rows = Math.ceil(n / cols);
  const top = title ? 28 : 0;
  const svg = new Svg(cols * PANEL_W, rows * PANEL_H + top);
  if (title) {
    svg.text((cols * PANEL_W) / 2, 19, title, {
      "font-family": "Helvetica, Arial, sans-serif",
      "font-size": "15",
      "text-anchor": "middle",
      "font-weight": "bold",
    });
  }
  const boxes: Box[] = [];
  for (let i = 0; i < n; i += 1) {
    boxes.push({
      x: (i % cols) * PANEL_W,
      y: top + Math.floor(i / cols) * PANEL_H,
      w: PANEL_W,
      h: PANEL_H,
    });
  }
  return { svg, boxes };
}

function fitAnnotation(fit: FitResult): string {
  const label = exponentLabel(fit.kind);
  const suffix = fit.low_confidence ? " (low confidence)" : "";
  return `${label} = ${fit.value.toPrecision(4)}${suffix}`;
}

// ---------------------------------------------------------------- kinds

function renderSpectrumPanels(spec: FigureSpec, inputs: LoadedInput[]): Svg {
  const panels: Array<{ title: string; pts: Array<[number, number]> }> = [];
  for (const input of inputs) {
    requireKind(input, "spectrum", "spectrum-panels");
    const re = numbers(input, "e_re", "spectrum-panels");
    const im = numbers(input, "e_im", "spectrum-panels");
    const lLabel = chainLabel(input);
    for (const [key, rows] of groupByColumn(input.csv, "gamma_im")) {
      const pts: Array<[number, number]> = [];
      for (const r of rows) {
        const x = re[r];
        const y = im[r];
        if (x != null && y != null) pts.push([x, y]);
      }
      panels.push({ title: `${lLabel}, Γ = ${Number(key)}`, pts });
    }
  }
  const { svg, boxes } = panelGrid(panels.length, spec.title);
  panels.forEach((panel, i) => {
    drawPanel(
      svg,
      boxes[i] as Box,
      [
        {
          label: "",
          points: panel.pts,
          color: seriesColor(0),
          line: false,
        },
      ],
      {
        x: { label: "Re E", log: spec.log_axes.x },
        y: { label: "Im E", log: spec.log_axes.y },
        title: panel.title,
      },
    );
  });
  return svg;
}

/** Shared body of the order-parameter and susceptibility curves:
 * y(Γ) per chain, optionally folded to a distance-to-transition axis
 * and annotated with a fitted power law. */
function renderDecayCurve(
  spec: FigureSpec,
  inputs: LoadedInput[],
  opts: {
    figKind: string;
    ycol: "mx" | "chi";
    yLabel: string;
    fitKind: "beta" | "gamma";
    /** Distance from the critical point, for folded axes. */
    distance: (g: number, gc: number) => number;
    /** Sign of the fitted exponent along the distance axis. */
    exponentSign: 1 | -1;
    magnitude: boolean;
  },
): Svg {
  const folded = inputs.every((i) => i.gammaC !== null);
  const xLabel = folded
    ? opts.exponentSign > 0
      ? "Γc − Γ"
      : "Γ − Γc"
    : "Γ";
  const series: Series[] = inputs.map((input, i) => {
    let pts = pairs(input, "gamma_im", opts.ycol, opts.figKind);
    if (folded) {
      const gc = input.gammaC as number;
      pts = pts.map(([g, v]) => [opts.distance(g, gc), v]);
    }
    if (opts.magnitude) pts = pts.map(([x, v]) => [x, Math.abs(v)]);
    // Folding reverses the axis direction; sort so lines read left to
    // right.
    pts.sort((a, b) => a[0] - b[0]);
    return { label: chainLabel(input), points: pts, color: seriesColor(i) };
  });

  const fits = spec.fits
    .map((p) => loadFit(p))
    .filter((f) => f.kind === opts.fitKind);
  const annotations = fits.map(fitAnnotation);

  if (spec.log_axes.x && spec.log_axes.y && folded && fits.length > 0) {
    const fit = fits[0] as FitResult;
    const line = powerLawLine(
      fit.amplitude,
      opts.exponentSign * fit.value,
      [fit.window[0], fit.window[1]],
      true,
    );
    series.push({
      label: "fit",
      points: line,
      color: "#000000",
      markers: false,
      dashed: true,
    });
  }

  const { svg, boxes } = panelGrid(1, spec.title);
  drawPanel(svg, boxes[0] as Box, series, {
    x: { label: xLabel, log: spec.log_axes.x },
    y: { label: opts.yLabel, log: spec.log_axes.y },
    annotations,
  });
  return svg;
}

function renderMxVsGamma(spec: FigureSpec, inputs: LoadedInput[]): Svg {
  return renderDecayCurve(spec, inputs, {
    figKind: "mx-vs-gamma",
    ycol: "mx",
    yLabel: "|Mx|",
    fitKind: "beta",
    distance: (g, gc) => gc - g,
    exponentSign: 1,
    magnitude: true,
  });
}

function renderChiVsGamma(spec: FigureSpec, inputs: LoadedInput[]): Svg {
  return renderDecayCurve(spec, inputs, {
    figKind: "chi-vs-gamma",
    ycol: "chi",
    yLabel: "χ",
    fitKind: "gamma",
    distance: (g, gc) => g - gc,
    exponentSign: -1,
    magnitude: true,
  });
}

function renderCorrAndEntropy(spec: FigureSpec, inputs: LoadedInput[]): Svg {
  const corrs = inputs.filter((i) => i.kind === "corr");
  const ents = inputs.filter((i) => i.kind === "entropy");
  if (corrs.length === 0 || ents.length === 0) {
    const got = inputs.map((i) => `${i.name}: ${i.kind}`).join(", ");
    throw new RenderError(
      `corr-and-entropy needs at least one corr CSV and one entropy ` +
        `CSV (got ${got})`,
    );
  }

  const corrSeries: Series[] = [];
  for (const input of corrs) {
    const ns = numbers(input, "n", "corr-and-entropy");
    const vals = numbers(input, "value", "corr-and-entropy");
    for (const [key, rows] of groupByColumn(input.csv, "gamma")) {
      const pts: Array<[number, number]> = [];
      for (const r of rows) {
        const n = ns[r];
        const v = vals[r];
        if (n != null && v != null) pts.push([n, Math.abs(v)]);
      }
      pts.sort((a, b) => a[0] - b[0]);
      corrSeries.push({
        label: `Γ = ${Number(key)}`,
        points: pts,
        color: seriesColor(corrSeries.length),
      });
    }
  }

  const entSeries: Series[] = ents.map((input, i) => {
    const pts = pairs(input, "gamma_im", "svn", "corr-and-entropy");
    pts.sort((a, b) => a[0] - b[0]);
    return { label: chainLabel(input), points: pts, color: seriesColor(i) };
  });

  const xiFits = spec.fits.map((p) => loadFit(p)).filter((f) => f.kind === "xi");

  const { svg, boxes } = panelGrid(2, spec.title);
  drawPanel(svg, boxes[0] as Box, corrSeries, {
    x: { label: "n", log: spec.log_axes.x },
    y: { label: "|Δσx1 σxn|", log: spec.log_axes.y },
    title: "Correlation profile",
    annotations: xiFits.map(fitAnnotation),
  });
  drawPanel(svg, boxes[1] as Box, entSeries, {
    x: { label: "Γ", log: false },
    y: { label: "Svn(L/2)", log: false },
    title: "Half-chain entropy",
  });
  return svg;
}

function renderHermitianComparison(spec: FigureSpec, inputs: LoadedInput[]): Svg {
  const mk = (ycol: "nup" | "mx", yLabel: string): Series[] =>
    inputs.map((input, i) => {
      const ls = numbers(input, "L", "hermitian-comparison");
      const gs = numbers(input, "gamma_re", "hermitian-comparison");
      const ys = numbers(input, ycol, "hermitian-comparison");
      const pts: Array<[number, number]> = [];
      for (let r = 0; r < gs.length; r += 1) {
        const g = gs[r];
        const y = ys[r];
        const l = ls[r];
        if (g != null && y != null && l != null && l > 0) {
          pts.push([g, y / l]);
        }
      }
      pts.sort((a, b) => a[0] - b[0]);
      return { label: chainLabel(input), points: pts, color: seriesColor(i) };
    });

  const { svg, boxes } = panelGrid(2, spec.title);
  drawPanel(svg, boxes[0] as Box, mk("nup", "n↑ / L"), {
    x: { label: "Γ (re)", log: spec.log_axes.x },
    y: { label: "n↑ / L", log: spec.log_axes.y },
    title: "Excitation density",
  });
  drawPanel(svg, boxes[1] as Box, mk("mx", "Mx / L"), {
    x: { label: "Γ (re)", log: spec.log_axes.x },
    y: { label: "Mx / L", log: spec.log_axes.y },
    title: "x-magnetization",
  });
  return svg;
}

function renderGap(spec: FigureSpec, inputs: LoadedInput[]): Svg {
  const series: Series[] = inputs.map((input, i) => {
    const pts = pairs(input, "gamma_im", "gap", "gap");
    pts.sort((a, b) => a[0] - b[0]);
    return { label: chainLabel(input), points: pts, color: seriesColor(i) };
  });
  const { svg, boxes } = panelGrid(1, spec.title);
  drawPanel(svg, boxes[0] as Box, series, {
    x: { label: "Γ", log: spec.log_axes.x },
    y: { label: "gap", log: spec.log_axes.y },
  });
  return svg;
}

function renderExtrapolation(spec: FigureSpec, inputs: LoadedInput[]): Svg {
  const series: Series[] = inputs.map((input, i) => {
    requireKind(input, "gc-table", "extrapolation");
    const pts = pairs(input, "L", "gamma_c", "extrapolation");
    pts.sort((a, b) => a[0] - b[0]);
    return {
      label: input.name,
      points: pts,
      color: seriesColor(i),
      line: false,
    };
  });

  const annotations: string[] = [];
  const fit = spec.fits
    .map((p) => loadFit(p))
    .find((f) => f.kind === "gc-extrapolation");
  if (fit) {
    const ls = series.flatMap((s) => s.points.map((p) => p[0]));
    const lo = Math.min(...ls);
    const hi = Math.max(...ls);
    const p = typeof fit.meta["p"] === "number" ? (fit.meta["p"] as number) : null;
    if (p !== null) {
      const curve: Array<[number, number]> = [];
      for (let i = 0; i < 100; i += 1) {
        const L = lo + ((hi - lo) * i) / 99;
        curve.push([L, fit.value - fit.amplitude * Math.pow(L, -p)]);
      }
      series.push({
        label: "fit",
        points: curve,
        color: "#000000",
        markers: false,
      });
      annotations.push(`p = ${p.toPrecision(3)}`);
    }
    series.push({
      label: "Γ∞",
      points: [
        [lo, fit.value],
        [hi, fit.value],
      ],
      color: "#555555",
      markers: false,
      dashed: true,
    });
    annotations.unshift(`Γ∞ = ${fit.value.toPrecision(6)}`);
  }

  const { svg, boxes } = panelGrid(1, spec.title);
  drawPanel(svg, boxes[0] as Box, series, {
    x: { label: "L", log: spec.log_axes.x },
    y: { label: "Γc(L)", log: spec.log_axes.y },
    annotations,
  });
  return svg;
}

// ------------------------------------------------------------- dispatch

export function renderFigure(spec: FigureSpec): string {
  const inputs = loadInputs(spec);
  switch (spec.kind) {
    case "spectrum-panels":
      return renderSpectrumPanels(spec, inputs).toString();
    case "mx-vs-gamma":
      return renderMxVsGamma(spec, inputs).toString();
    case "chi-vs-gamma":
      return renderChiVsGamma(spec, inputs).toString();
    case "corr-and-entropy":
      return renderCorrAndEntropy(spec, inputs).toString();
    case "hermitian-comparison":
      return renderHermitianComparison(spec, inputs).toString();
    case "gap":
      return renderGap(spec, inputs).toString();
    case "extrapolation":
      return renderExtrapolation(spec, inputs).toString();
  }
}

/** Render and write the image; returns the path written.  The output
 * must name an .svg file — the renderer emits vector images only. */
export function renderToFile(spec: FigureSpec, outputOverride?: string): string {
  const out = resolve(outputOverride ?? spec.output);
  if (!out.endsWith(".svg")) {
    throw new RenderError(`output must be an .svg path, got ${out}`);
  }
  const svg = renderFigure(spec);
  mkdirSync(dirname(out), { recursive: true });
  writeFileSync(out, svg, "utf8");
  return out;
}
