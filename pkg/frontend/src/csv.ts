/**
 * Reader for the simulator's results CSV.
 *
 * One row per swept power configuration; power/statistic columns beyond
 * the configuration's miner count are empty. The header is fixed by the
 * producer and verified here so schema drift fails loudly.
 */

export const HEADER =
  "model,k,m1,m2,m3,m4,d,T,R,seed," +
  "mean_1,mean_2,mean_3,mean_4,ci_1,ci_2,ci_3,ci_4";

export interface SweepRow {
  model: "concurrent" | "conventional";
  k: number;
  /** Relative powers of all miners, honest last. */
  powers: number[];
  d: number;
  timesteps: number;
  repetitions: number;
  seed: bigint;
  means: number[];
  cis: number[];
}

export class CsvError extends Error {
  constructor(readonly lineNo: number, message: string) {
    super(`line ${lineNo}: ${message}`);
  }
}

function floats(cells: string[], lineNo: number): number[] {
  const out: number[] = [];
  for (const cell of cells) {
    if (cell === "") continue;
    const v = Number(cell);
    if (!Number.isFinite(v)) throw new CsvError(lineNo, `not a number: ${cell}`);
    out.push(v);
  }
  return out;
}

export function parseResults(text: string): SweepRow[] {
  const lines = text.split("\n");
  if ((lines[0] ?? "").trim() !== HEADER) {
    throw new CsvError(1, "missing or wrong header");
  }
  const rows: SweepRow[] = [];
  for (let i = 1; i < lines.length; i++) {
    const line = (lines[i] ?? "").trim();
    if (line === "") continue;
    const lineNo = i + 1;
    const cells = line.split(",");
    if (cells.length !== 18) {
      throw new CsvError(lineNo, `expected 18 columns, got ${cells.length}`);
    }
    const model = cells[0]!;
    if (model !== "concurrent" && model !== "conventional") {
      throw new CsvError(lineNo, `unknown model ${model}`);
    }
    const k = Number(cells[1]);
    const powers = floats(cells.slice(2, 6), lineNo);
    const means = floats(cells.slice(10, 14), lineNo);
    const cis = floats(cells.slice(14, 18), lineNo);
    if (powers.length === 0 || means.length !== powers.length ||
        cis.length !== powers.length) {
      throw new CsvError(lineNo, "power/mean/ci columns disagree");
    }
    if (!Number.isInteger(k) || k < 0 || k >= powers.length) {
      throw new CsvError(lineNo, `selfish count ${cells[1]} out of range`);
    }
    let seed: bigint;
    try {
      seed = BigInt(cells[9]!);
    } catch {
      throw new CsvError(lineNo, `bad seed ${cells[9]}`);
    }
    rows.push({
      model,
      k,
      powers,
      d: Number(cells[6]),
      timesteps: Number(cells[7]),
      repetitions: Number(cells[8]),
      seed,
      means,
      cis,
    });
  }
  return rows;
}

/** Keep only rows matching the requested model / selfish count. */
export function sliceRows(
  rows: SweepRow[],
  model?: string,
  k?: number,
): SweepRow[] {
  return rows.filter(
    (r) => (model === undefined || r.model === model) &&
      (k === undefined || r.k === k),
  );
}
