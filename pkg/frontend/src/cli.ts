#!/usr/bin/env node
/**
 * gridstore-figures --csv trials.csv --kind heatmap --metric relocations --out fig.svg
 *
 * Kinds: heatmap | lines-vs-size | lines-vs-k | ablation
 * Metrics: relocations | ioUsage | distanceSubopt (trial CSVs),
 *          successRate (ablation CSVs).
 * Optional: --side N fixes the grid side for lines-vs-k (default: largest).
 */

import { FigureKind, FigureSpec, render } from "./figures.js";
import { Metric } from "./csv.js";

const KINDS = new Set(["heatmap", "lines-vs-size", "lines-vs-k", "ablation"]);
const METRICS = new Set(["relocations", "ioUsage", "distanceSubopt", "successRate"]);

export class UsageError extends Error {}

const USAGE =
  "usage: gridstore-figures --csv <file> --kind <heatmap|lines-vs-size|lines-vs-k|ablation> " +
  "--metric <relocations|ioUsage|distanceSubopt|successRate> --out <file.svg> [--side N]";

export function parseArgs(argv: string[]): FigureSpec {
  const opts = new Map<string, string>();
  for (let i = 0; i < argv.length; i += 2) {
    const flag = argv[i];
    if (!flag.startsWith("--") || i + 1 >= argv.length) {
      throw new UsageError(`bad argument ${flag}`);
    }
    opts.set(flag.slice(2), argv[i + 1]);
  }
  for (const required of ["csv", "kind", "metric", "out"]) {
    if (!opts.has(required)) throw new UsageError(`--${required} is required`);
  }
  const kind = opts.get("kind")!;
  const metric = opts.get("metric")!;
  if (!KINDS.has(kind)) throw new UsageError(`unknown kind ${kind}`);
  if (!METRICS.has(metric)) throw new UsageError(`unknown metric ${metric}`);
  const spec: FigureSpec = {
    inputCsv: opts.get("csv")!,
    figureKind: kind as FigureKind,
    metric: metric as Metric,
    outputPath: opts.get("out")!,
  };
  const side = opts.get("side");
  if (side !== undefined) {
    const parsed = Number(side);
    if (!Number.isInteger(parsed) || parsed < 1) throw new UsageError(`bad --side ${side}`);
    spec.side = parsed;
  }
  return spec;
}

export function main(argv: string[]): number {
  let spec: FigureSpec;
  try {
    spec = parseArgs(argv);
  } catch (err) {
    console.error(err instanceof Error ? `error: ${err.message}` : String(err));
    console.error(USAGE);
    return 2;
  }
  try {
    render(spec);
    console.error(`wrote ${spec.outputPath}`);
    return 0;
  } catch (err) {
    console.error(err instanceof Error ? `error: ${err.message}` : String(err));
    return 1;
  }
}

if (import.meta.url === `file://${process.argv[1]}`) {
  process.exit(main(process.argv.slice(2)));
}
