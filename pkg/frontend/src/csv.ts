/**
 * Reader for the sweep aggregate CSV:
 *
 *   # fairdiv sweep agg v1
 *   n,m,e_max,mechanism,mean_ratio,stderr,trials,low_count
 *   10,20,1,CEN,0.99,0.001,100,false
 *
 * Comment lines start with '#'. The column header must match exactly; this
 * component reads only the aggregate file, never raw per-trial data.
 */

export const AGG_COLUMNS =
  "n,m,e_max,mechanism,mean_ratio,stderr,trials,low_count";

export interface AggRow {
  n: number;
  m: number;
  eMax: number;
  mechanism: string;
  mean: number;
  stderr: number;
  trials: number;
  lowCount: boolean;
}

export function parseAggCsv(text: string): AggRow[] {
  const lines = text
    .split(/\r?\n/)
    .filter((line) => line.length > 0 && !line.startsWith("#"));
  if (lines.length === 0) {
    throw new Error("empty aggregate CSV");
  }
  if (lines[0] !== AGG_COLUMNS) {
    throw new Error(
      `schema mismatch: expected header "${AGG_COLUMNS}", got "${lines[0]}"`,
    );
  }
  const rows: AggRow[] = [];
  for (const line of lines.slice(1)) {
    const parts = line.split(",");
    if (parts.length !== 8) {
      throw new Error(`schema mismatch: bad row "${line}"`);
    }
    const [n, m, eMax, mechanism, mean, stderr, trials, lowCount] = parts;
    const row: AggRow = {
      n: Number(n),
      m: Number(m),
      eMax: Number(eMax),
      mechanism,
      mean: Number(mean),
      stderr: Number(stderr),
      trials: Number(trials),
      lowCount: lowCount === "true",
    };
    if (
      !Number.isFinite(row.n) ||
      !Number.isFinite(row.eMax) ||
      !Number.isFinite(row.mean) ||
      !Number.isFinite(row.stderr)
    ) {
      throw new Error(`schema mismatch: non-numeric field in "${line}"`);
    }
    rows.push(row);
  }
  if (rows.length === 0) {
    throw new Error("aggregate CSV has no data rows");
  }
  return rows;
}

/** Mechanism -> sorted [eMax, mean, stderr] series. */
export function groupByMechanism(
  rows: AggRow[],
): Map<string, { eMax: number; mean: number; stderr: number }[]> {
  const sizes = new Set(rows.map((r) => `${r.n}x${r.m}`));
  if (sizes.size > 1) {
    throw new Error(
      `aggregate CSV mixes problem sizes (${[...sizes].join(", ")}); plot one size at a time`,
    );
  }
  const series = new Map<string, { eMax: number; mean: number; stderr: number }[]>();
  for (const row of rows) {
    const list = series.get(row.mechanism) ?? [];
    list.push({ eMax: row.eMax, mean: row.mean, stderr: row.stderr });
    series.set(row.mechanism, list);
  }
  for (const list of series.values()) {
    list.sort((a, b) => a.eMax - b.eMax);
  }
  return series;
}

/**
 * Grid indices where the sign of (first - second) flips between adjacent
 * points: the crossover cells of two mechanism curves.
 */
export function crossoverIndices(
  first: { eMax: number; mean: number }[],
  second: { eMax: number; mean: number }[],
): number[] {
  const out: number[] = [];
  const len = Math.min(first.length, second.length);
  for (let i = 0; i + 1 < len; i++) {
    const before = first[i].mean - second[i].mean;
    const after = first[i + 1].mean - second[i + 1].mean;
    if (before !== 0 && Math.sign(before) !== Math.sign(after)) {
      out.push(i);
    }
  }
  return out;
}
