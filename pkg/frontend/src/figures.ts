/**
 * Figure renderers.  All four figure kinds write standalone SVG documents.
 *
 * Every plotted aggregate is embedded at full precision in data attributes
 * (data-mean / data-std / data-count, or data-rate for ablation curves) next
 * to the rounded display text, so downstream checks can compare the figure
 * against an independent recomputation exactly.
 */

import { readFileSync, writeFileSync } from "node:fs";

import {
  byK,
  bySide,
  byVariantSideK,
  CellStats,
  feasibilityLimit,
  PointStats,
} from "./aggregate.js";
import {
  AblationRow,
  Metric,
  parseAblationCsv,
  parseTrialCsv,
  TrialMetric,
  TrialRow,
} from "./csv.js";
import { document, el, fmt, heatColor, SERIES_COLORS, text } from "./svg.js";

export type FigureKind = "heatmap" | "lines-vs-size" | "lines-vs-k" | "ablation";

export interface FigureSpec {
  inputCsv: string;
  figureKind: FigureKind;
  metric: Metric;
  outputPath: string;
  /** Focus side for lines-vs-k; defaults to the largest side in the CSV. */
  side?: number;
}

const CELL = 72;
const CELL_H = 44;
const MARGIN = { top: 44, right: 24, bottom: 46, left: 64 };

export function renderHeatmap(rows: TrialRow[], metric: TrialMetric): string {
  if (rows.length === 0) throw new Error("no usable rows in the trial CSV");
  const cells = byVariantSideK(rows, metric);
  const variants = [...new Set(cells.map((c) => c.variant))];
  const sides = [...new Set(cells.map((c) => c.side))].sort((a, b) => a - b);
  const ks = [...new Set(cells.map((c) => c.k))].sort((a, b) => a - b);
  const byKey = new Map<string, CellStats>();
  for (const cell of cells) byKey.set(`${cell.variant}|${cell.side}|${cell.k}`, cell);
  const maxMean = Math.max(...cells.map((c) => c.mean), 1e-12);

  const panelW = ks.length * CELL;
  const panelGap = 40;
  const width = MARGIN.left + variants.length * (panelW + panelGap) - panelGap + MARGIN.right;
  const height = MARGIN.top + sides.length * CELL_H + MARGIN.bottom;
  const parts: string[] = [];

  variants.forEach((variant, vi) => {
    const x0 = MARGIN.left + vi * (panelW + panelGap);
    parts.push(
      text(x0 + panelW / 2, MARGIN.top - 18, variant, {
        "text-anchor": "middle",
        "font-size": 14,
        "font-weight": "bold",
      }),
    );
    sides.forEach((side, si) => {
      const y0 = MARGIN.top + si * CELL_H;
      if (vi === 0) {
        parts.push(
          text(MARGIN.left - 10, y0 + CELL_H / 2 + 4, `${side}x${side}`, {
            "text-anchor": "end",
            "font-size": 11,
          }),
        );
      }
      ks.forEach((k, ki) => {
        const x = x0 + ki * CELL;
        const cell = byKey.get(`${variant}|${side}|${k}`);
        if (!cell) {
          // combination absent from the CSV: blank cell, not a zero
          parts.push(
            el("rect", {
              x, y: y0, width: CELL, height: CELL_H,
              fill: "none", stroke: "#bbb", "stroke-dasharray": "3 3", class: "blank-cell",
            }),
          );
          return;
        }
        const label = `${fmt(cell.mean)}±${fmt(cell.std)}`;
        const dark = cell.mean / maxMean > 0.55;
        parts.push(
          el(
            "g",
            {
              class: "cell",
              "data-variant": variant,
              "data-side": side,
              "data-k": k,
              "data-metric": metric,
              "data-mean": String(cell.mean),
              "data-std": String(cell.std),
              "data-count": cell.count,
            },
            [
              el("rect", {
                x, y: y0, width: CELL, height: CELL_H,
                fill: heatColor(cell.mean / maxMean), stroke: "#888",
              }),
              text(x + CELL / 2, y0 + CELL_H / 2 + 4, label, {
                "text-anchor": "middle",
                "font-size": 11,
                fill: dark ? "white" : "black",
              }),
            ],
          ),
        );
      });
    });
    ks.forEach((k, ki) => {
      parts.push(
        text(x0 + ki * CELL + CELL / 2, MARGIN.top + sides.length * CELL_H + 16, `k=${k}`, {
          "text-anchor": "middle",
          "font-size": 11,
        }),
      );
    });
  });
  parts.push(
    text(width / 2, height - 8, `${metric}: mean ± std over trials`, {
      "text-anchor": "middle",
      "font-size": 12,
    }),
  );
  return document(width, height, parts);
}

interface Series {
  label: string;
  points: { x: number; mean: number; std: number; count: number }[];
}

function lineChart(
  title: string,
  xLabel: string,
  yLabel: string,
  series: Series[],
  extras: { limitK?: number } = {},
): string {
  const width = 460;
  const height = 320;
  const plot = {
    x0: MARGIN.left,
    y0: MARGIN.top,
    w: width - MARGIN.left - MARGIN.right,
    h: height - MARGIN.top - MARGIN.bottom,
  };
  const xs = series.flatMap((s) => s.points.map((p) => p.x));
  const tops = series.flatMap((s) => s.points.map((p) => p.mean + p.std));
  const xMin = Math.min(...xs);
  const xMax = Math.max(...xs);
  const yMax = Math.max(...tops, 1e-12);
  const sx = (x: number) =>
    plot.x0 + (xMax === xMin ? plot.w / 2 : ((x - xMin) / (xMax - xMin)) * plot.w);
  const sy = (y: number) => plot.y0 + plot.h - (y / yMax) * plot.h;

  const parts: string[] = [
    el("rect", { x: plot.x0, y: plot.y0, width: plot.w, height: plot.h, fill: "none", stroke: "#333" }),
    text(width / 2, MARGIN.top - 16, title, { "text-anchor": "middle", "font-size": 14, "font-weight": "bold" }),
    text(width / 2, height - 8, xLabel, { "text-anchor": "middle", "font-size": 12 }),
    text(14, plot.y0 + plot.h / 2, yLabel, {
      "text-anchor": "middle", "font-size": 12, transform: `rotate(-90 14 ${plot.y0 + plot.h / 2})`,
    }),
  ];
  for (const x of [...new Set(xs)].sort((a, b) => a - b)) {
    parts.push(text(sx(x), plot.y0 + plot.h + 16, String(x), { "text-anchor": "middle", "font-size": 10 }));
  }
  for (const frac of [0, 0.5, 1]) {
    parts.push(
      text(plot.x0 - 6, sy(yMax * frac) + 4, fmt(yMax * frac, 2), { "text-anchor": "end", "font-size": 10 }),
    );
  }
  if (extras.limitK !== undefined) {
    const x = sx(extras.limitK);
    parts.push(
      el("line", {
        x1: x, y1: plot.y0, x2: x, y2: plot.y0 + plot.h,
        stroke: "#444", "stroke-width": 3, "stroke-dasharray": "8 5",
        class: "limit-line", "data-limit-k": extras.limitK,
      }),
    );
  }
  series.forEach((s, si) => {
    const color = SERIES_COLORS[si % SERIES_COLORS.length];
    const coords = s.points.map((p) => `${sx(p.x)},${sy(p.mean)}`).join(" ");
    const children: string[] = [
      el("polyline", { points: coords, fill: "none", stroke: color, "stroke-width": 2 }),
    ];
    for (const p of s.points) {
      children.push(
        el("line", {
          x1: sx(p.x), y1: sy(Math.max(0, p.mean - p.std)), x2: sx(p.x), y2: sy(p.mean + p.std),
          stroke: color, "stroke-width": 1,
        }),
        el("circle", {
          cx: sx(p.x), cy: sy(p.mean), r: 3.5, fill: color,
          class: "point",
          "data-series": s.label,
          "data-x": p.x,
          "data-mean": String(p.mean),
          "data-std": String(p.std),
          "data-count": p.count,
        }),
      );
    }
    children.push(
      el("rect", { x: plot.x0 + plot.w - 150, y: plot.y0 + 8 + si * 16, width: 10, height: 10, fill: color }),
      text(plot.x0 + plot.w - 135, plot.y0 + 17 + si * 16, s.label, { "font-size": 11 }),
    );
    parts.push(el("g", { class: "series", "data-series": s.label }, children));
  });
  return document(width, height, parts);
}

function toSeries(points: PointStats[]): Series[] {
  const grouped = new Map<string, Series>();
  for (const p of points) {
    let s = grouped.get(p.variant);
    if (!s) {
      s = { label: p.variant, points: [] };
      grouped.set(p.variant, s);
    }
    s.points.push({ x: p.x, mean: p.mean, std: p.std, count: p.count });
  }
  return [...grouped.values()];
}

export function renderLinesVsSize(rows: TrialRow[], metric: TrialMetric): string {
  if (rows.length === 0) throw new Error("no usable rows in the trial CSV");
  return lineChart(
    `${metric} vs grid size (all k pooled)`,
    "grid side",
    metric,
    toSeries(bySide(rows, metric)),
  );
}

export function renderLinesVsK(rows: TrialRow[], metric: TrialMetric, side?: number): string {
  if (rows.length === 0) throw new Error("no usable rows in the trial CSV");
  const focus = side ?? Math.max(...rows.map((r) => r.r));
  const points = byK(rows, metric, focus);
  if (points.length === 0) throw new Error(`no rows for side ${focus}`);
  return lineChart(`${metric} vs k (${focus}x${focus})`, "k", metric, toSeries(points));
}

export function renderAblation(rows: AblationRow[]): string {
  if (rows.length === 0) throw new Error("no usable rows in the ablation CSV");
  const sides = [...new Set(rows.map((r) => r.side))].sort((a, b) => a - b);
  if (sides.length !== 1) {
    throw new Error("ablation figures plot one grid side per file; filter the CSV first");
  }
  const side = sides[0];
  const sorted = [...rows].sort((a, b) => a.k - b.k);
  const series: Series[] = [
    {
      label: "single offset",
      points: sorted.map((r) => ({ x: r.k, mean: r.plainSuccess, std: 0, count: r.trials })),
    },
    {
      label: "offset sweep",
      points: sorted.map((r) => ({ x: r.k, mean: r.enhancedSuccess, std: 0, count: r.trials })),
    },
  ];
  return lineChart(
    `solver success rate (${side}x${side})`,
    "k",
    "success rate",
    series,
    { limitK: feasibilityLimit(side) },
  );
}

export function render(spec: FigureSpec): void {
  const textContent = readFileSync(spec.inputCsv, "utf-8");
  let svg: string;
  if (spec.figureKind === "ablation") {
    if (spec.metric !== "successRate") {
      throw new Error("ablation figures use metric successRate");
    }
    svg = renderAblation(parseAblationCsv(textContent));
  } else {
    if (spec.metric === "successRate") {
      throw new Error(`metric successRate is only available for ablation figures`);
    }
    const rows = parseTrialCsv(textContent);
    const metric = spec.metric as TrialMetric;
    if (spec.figureKind === "heatmap") svg = renderHeatmap(rows, metric);
    else if (spec.figureKind === "lines-vs-size") svg = renderLinesVsSize(rows, metric);
    else svg = renderLinesVsK(rows, metric, spec.side);
  }
  writeFileSync(spec.outputPath, svg, "utf-8");
}
