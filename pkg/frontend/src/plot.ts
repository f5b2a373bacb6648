/**
 * Panel engine: draws one framed x/y plot (axes, ticks, grid, series,
 * legend, annotations) into a rectangular region of an SVG document.
 */

import { labelledTicks, makeScale, paddedExtent, tickLabel } from "./scales.js";
import { Svg } from "./svg.js";

export const PALETTE = [
  "#1f77b4",
  "#d62728",
  "#2ca02c",
  "#9467bd",
  "#ff7f0e",
  "#8c564b",
  "#17becf",
  "#e377c2",
] as const;

export function seriesColor(i: number): string {
  return PALETTE[i % PALETTE.length] as string;
}

export interface Series {
  label: string;
  points: ReadonlyArray<readonly [number, number]>;
  color: string;
  /** Draw circles at the points (default true). */
  markers?: boolean;
  /** Connect the points with a line (default true). */
  line?: boolean;
  dashed?: boolean;
}

export interface AxisOptions {
  label: string;
  log: boolean;
}

export interface PanelOptions {
  x: AxisOptions;
  y: AxisOptions;
  title?: string;
  /** Short text lines drawn inside the plot area (fit slopes etc.). */
  annotations?: string[];
  legend?: boolean;
}

export interface Box {
  x: number;
  y: number;
  w: number;
  h: number;
}

export class RenderError extends Error {
  constructor(message: string) {
    super(message);
    this.name = "RenderError";
  }
}

const MARGIN = { left: 64, right: 14, top: 30, bottom: 46 } as const;
const FONT = "font-family=\"Helvetica, Arial, sans-serif\"";

function usable(s: Series, log: { x: boolean; y: boolean }) {
  return s.points.filter(
    ([x, y]) =>
      Number.isFinite(x) &&
      Number.isFinite(y) &&
      (!log.x || x > 0) &&
      (!log.y || y > 0),
  );
}

export function drawPanel(
  svg: Svg,
  box: Box,
  series: ReadonlyArray<Series>,
  opts: PanelOptions,
): void {
  const log = { x: opts.x.log, y: opts.y.log };
  const kept = series
    .map((s) => ({ ...s, points: usable(s, log) }))
    .filter((s) => s.points.length > 0);
  if (kept.length === 0) {
    throw new RenderError(
      `no drawable points for panel ${JSON.stringify(opts.title ?? opts.y.label)}` +
        (log.x || log.y ? " (log axes drop non-positive values)" : ""),
    );
  }

  const xs = kept.flatMap((s) => s.points.map((p) => p[0]));
  const ys = kept.flatMap((s) => s.points.map((p) => p[1]));
  const plot: Box = {
    x: box.x + MARGIN.left,
    y: box.y + MARGIN.top,
    w: box.w - MARGIN.left - MARGIN.right,
    h: box.h - MARGIN.top - MARGIN.bottom,
  };
  const sx = makeScale(paddedExtent(xs, log.x), [plot.x, plot.x + plot.w], log.x);
  const sy = makeScale(paddedExtent(ys, log.y), [plot.y + plot.h, plot.y], log.y);

  svg.open("g", { class: "panel" });

  // Frame and grid.
  svg.rect(plot.x, plot.y, plot.w, plot.h, {
    fill: "#ffffff",
    stroke: "#333333",
    "stroke-width": "1",
  });
  const xLabels = labelledTicks(sx.ticks, log.x);
  const yLabels = labelledTicks(sy.ticks, log.y);
  for (const t of sx.ticks) {
    const px = sx.apply(t);
    svg.line(px, plot.y, px, plot.y + plot.h, {
      stroke: "#dddddd",
      "stroke-width": "0.5",
    });
    svg.line(px, plot.y + plot.h, px, plot.y + plot.h + 4, {
      stroke: "#333333",
      "stroke-width": "1",
    });
    if (xLabels.has(t)) {
      svg.raw(
        `<text x="${px.toFixed(2)}" y="${(plot.y + plot.h + 16).toFixed(2)}" ` +
          `${FONT} font-size="10" text-anchor="middle">` +
          `${tickLabel(t, log.x)}</text>`,
      );
    }
  }
  for (const t of sy.ticks) {
    const py = sy.apply(t);
    svg.line(plot.x, py, plot.x + plot.w, py, {
      stroke: "#dddddd",
      "stroke-width": "0.5",
    });
    svg.line(plot.x - 4, py, plot.x, py, {
      stroke: "#333333",
      "stroke-width": "1",
    });
    if (yLabels.has(t)) {
      svg.raw(
        `<text x="${(plot.x - 7).toFixed(2)}" y="${(py + 3).toFixed(2)}" ` +
          `${FONT} font-size="10" text-anchor="end">` +
          `${tickLabel(t, log.y)}</text>`,
      );
    }
  }

  // Axis labels and title.
  svg.text(plot.x + plot.w / 2, box.y + box.h - 10, opts.x.label, {
    "font-family": "Helvetica, Arial, sans-serif",
    "font-size": "12",
    "text-anchor": "middle",
  });
  const yLabelX = box.x + 16;
  const yLabelY = plot.y + plot.h / 2;
  svg.raw(
    `<text x="${yLabelX.toFixed(2)}" y="${yLabelY.toFixed(2)}" ${FONT} ` +
      `font-size="12" text-anchor="middle" ` +
      `transform="rotate(-90 ${yLabelX.toFixed(2)} ${yLabelY.toFixed(2)})">` +
      `${escapeText(opts.y.label)}</text>`,
  );
  if (opts.title) {
    svg.text(plot.x + plot.w / 2, box.y + 18, opts.title, {
      "font-family": "Helvetica, Arial, sans-serif",
      "font-size": "13",
      "text-anchor": "middle",
      "font-weight": "bold",
    });
  }

  // Series.
  for (const s of kept) {
    const pts = s.points.map(
      ([x, y]) => [sx.apply(x), sy.apply(y)] as const,
    );
    if (s.line !== false && pts.length > 1) {
      svg.polyline(pts, {
        stroke: s.color,
        "stroke-width": "1.5",
        ...(s.dashed ? { "stroke-dasharray": "5 3" } : {}),
      });
    }
    if (s.markers !== false) {
      for (const [px, py] of pts) {
        svg.circle(px, py, 2.4, { fill: s.color, stroke: "none" });
      }
    }
  }

  // Legend (top-right corner of the plot area).
  if (opts.legend !== false && kept.some((s) => s.label !== "")) {
    let row = 0;
    for (const s of kept) {
      if (s.label === "") continue;
      const ly = plot.y + 14 + row * 14;
      const lx = plot.x + plot.w - 10;
      svg.line(lx - 26, ly - 3, lx - 8, ly - 3, {
        stroke: s.color,
        "stroke-width": "2",
        ...(s.dashed ? { "stroke-dasharray": "5 3" } : {}),
      });
      svg.raw(
        `<text x="${(lx - 30).toFixed(2)}" y="${ly.toFixed(2)}" ${FONT} ` +
          `font-size="10" text-anchor="end">${escapeText(s.label)}</text>`,
      );
      row += 1;
    }
  }

  // Annotations (bottom-left corner of the plot area).
  for (let i = 0; i < (opts.annotations ?? []).length; i += 1) {
    const a = (opts.annotations as string[])[i] as string;
    svg.raw(
      `<text x="${(plot.x + 8).toFixed(2)}" ` +
        `y="${(plot.y + plot.h - 8 - 13 * ((opts.annotations as string[]).length - 1 - i)).toFixed(2)}" ` +
        `${FONT} font-size="11">${escapeText(a)}</text>`,
    );
  }

  svg.close("g");
}

function escapeText(s: string): string {
  return s
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;");
}

/** Map a fitted power law t ↦ A·t^±e onto a series of plotted points
 * spanning the given t-range (log-spaced when the axis is a log axis). */
export function powerLawLine(
  amplitude: number,
  exponent: number,
  tRange: readonly [number, number],
  logSpaced: boolean,
  samples = 60,
): Array<[number, number]> {
  const [lo, hi] = tRange;
  const out: Array<[number, number]> = [];
  for (let i = 0; i < samples; i += 1) {
    const f = i / (samples - 1);
    const t = logSpaced
      ? lo * Math.pow(hi / lo, f)
      : lo + (hi - lo) * f;
    out.push([t, amplitude * Math.pow(t, exponent)]);
  }
  return out;
}
