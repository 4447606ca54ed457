/** Minimal SVG assembly: elements as tagged strings, no dependencies. */

export function esc(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

export type Attrs = Record<string, string | number>;

export function el(tag: string, attrs: Attrs, children: string[] = []): string {
  const parts = Object.entries(attrs)
    .map(([k, v]) => `${k}="${esc(String(v))}"`)
    .join(" ");
  if (children.length === 0) return `<${tag} ${parts}/>`;
  return `<${tag} ${parts}>${children.join("")}</${tag}>`;
}

export function text(x: number, y: number, content: string, attrs: Attrs = {}): string {
  return el(
    "text",
    { x, y, "font-family": "sans-serif", ...attrs },
    [esc(content)],
  );
}

export function document(width: number, height: number, children: string[]): string {
  return [
    `<?xml version="1.0" encoding="UTF-8"?>`,
    el(
      "svg",
      { xmlns: "http://www.w3.org/2000/svg", width, height, viewBox: `0 0 ${width} ${height}` },
      [el("rect", { x: 0, y: 0, width, height, fill: "white" }), ...children],
    ),
  ].join("\n");
}

/** White -> steel blue ramp for normalized values in [0, 1]. */
export function heatColor(t: number): string {
  const clamp = Math.max(0, Math.min(1, t));
  const from = [255, 255, 255];
  const to = [54, 100, 165];
  const rgb = from.map((f, i) => Math.round(f + (to[i] - f) * clamp));
  return `rgb(${rgb[0]},${rgb[1]},${rgb[2]})`;
}

export const SERIES_COLORS = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"];

export function fmt(value: number, digits = 1): string {
  return value.toFixed(digits);
}
