/**
 * Minimal SVG assembly.  Documents are built as plain strings with a
 * fixed coordinate format, so the same plotted data always produces
 * byte-identical output — no font metrics, no toolkit state, no
 * timestamps.
 */

export function fmt(v: number): string {
  if (!Number.isFinite(v)) throw new Error(`non-finite coordinate: ${v}`);
  const rounded = Math.round(v * 100) / 100;
  // Normalize negative zero so -0.001 and 0.001 round to the same text.
  return (Object.is(rounded, -0) ? 0 : rounded).toString();
}

export function escapeXml(s: string): string {
  return s
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

export type Attrs = Record<string, string | number>;

function attrText(attrs: Attrs): string {
  const parts: string[] = [];
  for (const [key, value] of Object.entries(attrs)) {
    const text = typeof value === "number" ? fmt(value) : escapeXml(value);
    parts.push(` ${key}="${text}"`);
  }
  return parts.join("");
}

export class Svg {
  private readonly parts: string[] = [];

  constructor(
    readonly width: number,
    readonly height: number,
  ) {}

  raw(element: string): void {
    this.parts.push(element);
  }

  open(tag: string, attrs: Attrs = {}): void {
    this.parts.push(`<${tag}${attrText(attrs)}>`);
  }

  close(tag: string): void {
    this.parts.push(`</${tag}>`);
  }

  element(tag: string, attrs: Attrs = {}): void {
    this.parts.push(`<${tag}${attrText(attrs)}/>`);
  }

  line(x1: number, y1: number, x2: number, y2: number, attrs: Attrs = {}): void {
    this.element("line", { x1: fmt(x1), y1: fmt(y1), x2: fmt(x2), y2: fmt(y2), ...attrs });
  }

  rect(x: number, y: number, w: number, h: number, attrs: Attrs = {}): void {
    this.element("rect", { x: fmt(x), y: fmt(y), width: fmt(w), height: fmt(h), ...attrs });
  }

  circle(cx: number, cy: number, r: number, attrs: Attrs = {}): void {
    this.element("circle", { cx: fmt(cx), cy: fmt(cy), r: fmt(r), ...attrs });
  }

  /** Polyline through the points, drawn as an unfilled path. */
  polyline(points: ReadonlyArray<readonly [number, number]>, attrs: Attrs = {}): void {
    if (points.length === 0) return;
    const d = points
      .map(([x, y], i) => `${i === 0 ? "M" : "L"}${fmt(x)} ${fmt(y)}`)
      .join("");
    this.element("path", { d, fill: "none", ...attrs });
  }

  text(x: number, y: number, content: string, attrs: Attrs = {}): void {
    this.parts.push(
      `<text${attrText({ x: fmt(x), y: fmt(y), ...attrs })}>` +
        `${escapeXml(content)}</text>`,
    );
  }

  toString(): string {
    return (
      `<?xml version="1.0" encoding="UTF-8"?>\n` +
      `<svg xmlns="http://www.w3.org/2000/svg" width="${fmt(this.width)}" ` +
      `height="${fmt(this.height)}" viewBox="0 0 ${fmt(this.width)} ` +
      `${fmt(this.height)}">\n` +
      this.parts.join("\n") +
      `\n</svg>\n`
    );
  }
}
