/**
 * Grouped mean/std aggregation over trial rows.
 *
 * Figures group by (r, c, kRequested, storageAlgo, retrievalAlgo) and show
 * the mean plus the population standard deviation over the trials in the
 * group.  Any projection of the group key (drop k, drop size) reuses the
 * same machinery.
 */

import { TrialMetric, TrialRow } from "./csv.js";

export interface Stats {
  mean: number;
  std: number;
  count: number;
}

export function stats(values: number[]): Stats {
  if (values.length === 0) throw new Error("cannot aggregate an empty group");
  const mean = values.reduce((acc, v) => acc + v, 0) / values.length;
  const variance =
    values.reduce((acc, v) => acc + (v - mean) * (v - mean), 0) / values.length;
  return { mean, std: Math.sqrt(variance), count: values.length };
}

export function variantLabel(row: { storageAlgo: string; retrievalAlgo: string }): string {
  return `${row.storageAlgo}+${row.retrievalAlgo}`;
}

export interface CellStats extends Stats {
  side: number;
  k: number;
  variant: string;
}

/** Full heatmap key: one cell per (side, requested k) per variant. */
export function byVariantSideK(rows: TrialRow[], metric: TrialMetric): CellStats[] {
  const groups = new Map<string, { side: number; k: number; variant: string; values: number[] }>();
  for (const row of rows) {
    const variant = variantLabel(row);
    const key = `${variant}|${row.r}|${row.kRequested}`;
    let group = groups.get(key);
    if (!group) {
      group = { side: row.r, k: row.kRequested, variant, values: [] };
      groups.set(key, group);
    }
    group.values.push(row[metric]);
  }
  return [...groups.values()]
    .map((g) => ({ side: g.side, k: g.k, variant: g.variant, ...stats(g.values) }))
    .sort((a, b) =>
      a.variant === b.variant ? a.side - b.side || a.k - b.k : a.variant < b.variant ? -1 : 1,
    );
}

export interface PointStats extends Stats {
  x: number;
  variant: string;
}

/** Metric vs grid side, pooling every k (one point per side per variant). */
export function bySide(rows: TrialRow[], metric: TrialMetric): PointStats[] {
  return project(rows, metric, (row) => row.r);
}

/** Metric vs requested k at a fixed grid side. */
export function byK(rows: TrialRow[], metric: TrialMetric, side: number): PointStats[] {
  return project(rows.filter((r) => r.r === side), metric, (row) => row.kRequested);
}

function project(
  rows: TrialRow[],
  metric: TrialMetric,
  key: (row: TrialRow) => number,
): PointStats[] {
  const groups = new Map<string, { x: number; variant: string; values: number[] }>();
  for (const row of rows) {
    const variant = variantLabel(row);
    const x = key(row);
    const id = `${variant}|${x}`;
    let group = groups.get(id);
    if (!group) {
      group = { x, variant, values: [] };
      groups.set(id, group);
    }
    group.values.push(row[metric]);
  }
  return [...groups.values()]
    .map((g) => ({ x: g.x, variant: g.variant, ...stats(g.values) }))
    .sort((a, b) => (a.variant === b.variant ? a.x - b.x : a.variant < b.variant ? -1 : 1));
}

/** Largest k for which enough columns exist to guarantee zero relocations. */
export function feasibilityLimit(cols: number): number {
  return Math.floor((cols - 3) / 2);
}
