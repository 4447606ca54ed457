/**
 * Readers for the two CSV schemas the gridstore harness emits.
 *
 * Trial rows:
 *   r,c,kRequested,kAchieved,trialIndex,seed,storageAlgo,retrievalAlgo,
 *   relocations,ioUsage,totalDistance,distanceSubopt,storageTimeMs,
 *   retrievalTimeMs,robustFound
 *
 * Ablation rows:
 *   side,k,trials,plainSuccess,enhancedSuccess
 *
 * Aborted trials carry -1 metric sentinels and are dropped here so that
 * aggregates never mix error rows with real measurements.
 */

export interface TrialRow {
  r: number;
  c: number;
  kRequested: number;
  kAchieved: number;
  trialIndex: number;
  seed: string;
  storageAlgo: string;
  retrievalAlgo: string;
  relocations: number;
  ioUsage: number;
  totalDistance: number;
  distanceSubopt: number;
  storageTimeMs: number;
  retrievalTimeMs: number;
  robustFound: boolean;
}

export interface AblationRow {
  side: number;
  k: number;
  trials: number;
  plainSuccess: number;
  enhancedSuccess: number;
}

export type TrialMetric = "relocations" | "ioUsage" | "distanceSubopt";
export type Metric = TrialMetric | "successRate";

const TRIAL_HEADER = [
  "r", "c", "kRequested", "kAchieved", "trialIndex", "seed",
  "storageAlgo", "retrievalAlgo", "relocations", "ioUsage",
  "totalDistance", "distanceSubopt", "storageTimeMs", "retrievalTimeMs",
  "robustFound",
];

const ABLATION_HEADER = ["side", "k", "trials", "plainSuccess", "enhancedSuccess"];

function splitCsv(text: string): string[][] {
  return text
    .split(/\r?\n/)
    .filter((line) => line.trim().length > 0)
    .map((line) => line.split(","));
}

function checkHeader(got: string[], want: string[], what: string): void {
  if (got.length !== want.length || got.some((h, i) => h !== want[i])) {
    throw new Error(`${what} header mismatch: expected "${want.join(",")}", got "${got.join(",")}"`);
  }
}

function num(field: string, value: string): number {
  const parsed = Number(value);
  if (!Number.isFinite(parsed)) {
    throw new Error(`field ${field} is not a number: ${JSON.stringify(value)}`);
  }
  return parsed;
}

export function parseTrialCsv(text: string): TrialRow[] {
  const lines = splitCsv(text);
  if (lines.length === 0) throw new Error("empty trial CSV");
  checkHeader(lines[0], TRIAL_HEADER, "trial CSV");
  const rows: TrialRow[] = [];
  for (const cols of lines.slice(1)) {
    const row: TrialRow = {
      r: num("r", cols[0]),
      c: num("c", cols[1]),
      kRequested: num("kRequested", cols[2]),
      kAchieved: num("kAchieved", cols[3]),
      trialIndex: num("trialIndex", cols[4]),
      seed: cols[5],
      storageAlgo: cols[6],
      retrievalAlgo: cols[7],
      relocations: num("relocations", cols[8]),
      ioUsage: num("ioUsage", cols[9]),
      totalDistance: num("totalDistance", cols[10]),
      distanceSubopt: num("distanceSubopt", cols[11]),
      storageTimeMs: num("storageTimeMs", cols[12]),
      retrievalTimeMs: num("retrievalTimeMs", cols[13]),
      robustFound: cols[14] === "true",
    };
    if (row.relocations < 0 || row.ioUsage < 0 || row.totalDistance < 0) {
      continue; // error-row sentinel
    }
    rows.push(row);
  }
  return rows;
}

export function parseAblationCsv(text: string): AblationRow[] {
  const lines = splitCsv(text);
  if (lines.length === 0) throw new Error("empty ablation CSV");
  checkHeader(lines[0], ABLATION_HEADER, "ablation CSV");
  return lines.slice(1).map((cols) => ({
    side: num("side", cols[0]),
    k: num("k", cols[1]),
    trials: num("trials", cols[2]),
    plainSuccess: num("plainSuccess", cols[3]),
    enhancedSuccess: num("enhancedSuccess", cols[4]),
  }));
}
