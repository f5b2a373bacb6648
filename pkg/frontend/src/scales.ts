/**
 * Axis scales: thin wrappers over d3's linear/log scales that pin the
 * tick counts and label formats so rendering stays deterministic.
 */

import { scaleLinear, scaleLog } from "d3";

export interface Scale {
  apply(v: number): number;
  ticks: number[];
  domain: readonly [number, number];
  log: boolean;
}

export function makeScale(
  domain: readonly [number, number],
  range: readonly [number, number],
  log: boolean,
): Scale {
  if (log) {
    const s = scaleLog().domain(domain).range(range).nice();
    const d = s.domain() as [number, number];
    return { apply: (v) => s(v), ticks: s.ticks(), domain: [d[0], d[1]], log };
  }
  const s = scaleLinear().domain(domain).range(range).nice(6);
  const d = s.domain() as [number, number];
  return { apply: (v) => s(v), ticks: s.ticks(6), domain: [d[0], d[1]], log };
}

/** Tick label: powers of ten in exponent form on log axes; otherwise
 * the shortest faithful decimal. */
export function tickLabel(v: number, log: boolean): string {
  if (v === 0) return "0";
  const mag = Math.abs(v);
  if (log || mag >= 1e4 || mag < 1e-3) {
    const exp = Math.log10(mag);
    if (Math.abs(exp - Math.round(exp)) < 1e-9 && v > 0) {
      return `1e${Math.round(exp)}`;
    }
    return v.toExponential(1).replace("e+", "e");
  }
  return Number(v.toPrecision(6)).toString();
}

/** On crowded log axes, label only the powers of ten. */
export function labelledTicks(ticks: number[], log: boolean): Set<number> {
  if (!log || ticks.length <= 8) return new Set(ticks);
  const powers = ticks.filter((t) => {
    const exp = Math.log10(Math.abs(t));
    return Math.abs(exp - Math.round(exp)) < 1e-9;
  });
  return new Set(powers.length >= 2 ? powers : ticks);
}

/** Data extent with a small symmetric pad; degenerate spans widen so a
 * single value still yields a drawable axis. */
export function paddedExtent(values: number[], log: boolean): [number, number] {
  let lo = Infinity;
  let hi = -Infinity;
  for (const v of values) {
    if (!Number.isFinite(v)) continue;
    if (log && v <= 0) continue;
    if (v < lo) lo = v;
    if (v > hi) hi = v;
  }
  if (!(lo <= hi)) throw new Error("no drawable points for axis");
  if (log) {
    if (lo === hi) return [lo / 2, hi * 2];
    return [lo, hi];
  }
  if (lo === hi) {
    const pad = lo === 0 ? 1 : Math.abs(lo) * 0.1;
    return [lo - pad, hi + pad];
  }
  const pad = (hi - lo) * 0.04;
  return [lo - pad, hi + pad];
}
