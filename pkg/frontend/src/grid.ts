/**
 * Lattice assembly for two-selfish-miner sweeps.
 *
 * Rows are placed on the (m1, m2) lattice implied by their power values;
 * the honest miner holds the remainder, so the valid domain is the lower
 * triangle m1 + m2 <= 1 - step. Heat maps and contour extraction require
 * the triangle to be fully populated.
 */

import { SweepRow } from "./csv.js";

export interface Lattice {
  step: number;
  /** Lattice coordinates, ascending. */
  m1: number[];
  m2: number[];
  /** value[i][j] for (m1[i], m2[j]); NaN outside the triangular domain. */
  value: number[][];
  rows: (SweepRow | undefined)[][];
}

export class GridError extends Error {}

const EPS = 1e-9;

function latticeStep(values: number[]): number {
  let step = Infinity;
  for (let i = 1; i < values.length; i++) {
    const d = values[i]! - values[i - 1]!;
    if (d > EPS && d < step) step = d;
  }
  if (!Number.isFinite(step)) throw new GridError("degenerate lattice");
  return step;
}

function round6(x: number): number {
  return Math.round(x * 1e6) / 1e6;
}

export type CellValue = (row: SweepRow) => number;

/** Mean reward of a miner (1-based index). */
export function meanOf(miner: number): CellValue {
  return (row) => row.means[miner - 1]!;
}

/** CI half-width of a miner (1-based index). */
export function ciOf(miner: number): CellValue {
  return (row) => row.cis[miner - 1]!;
}

/** Excess reward over fair share of a miner (1-based index). */
export function profitOf(miner: number): CellValue {
  return (row) => row.means[miner - 1]! - row.powers[miner - 1]!;
}

export function assembleLattice(rows: SweepRow[], cell: CellValue): Lattice {
  if (rows.length === 0) throw new GridError("no rows to grid");
  if (rows.some((r) => r.k !== 2)) {
    throw new GridError("lattice plots need two-selfish-miner rows");
  }
  const m1 = [...new Set(rows.map((r) => round6(r.powers[0]!)))].sort(
    (a, b) => a - b,
  );
  const m2 = [...new Set(rows.map((r) => round6(r.powers[1]!)))].sort(
    (a, b) => a - b,
  );
  const step = latticeStep(m1.length > 1 ? m1 : m2);

  const value: number[][] = m1.map(() => m2.map(() => NaN));
  const placed: (SweepRow | undefined)[][] = m1.map(() =>
    m2.map(() => undefined),
  );
  const index = new Map<string, number>();
  m1.forEach((v, i) => index.set(`x${v}`, i));
  m2.forEach((v, j) => index.set(`y${v}`, j));
  for (const row of rows) {
    const i = index.get(`x${round6(row.powers[0]!)}`);
    const j = index.get(`y${round6(row.powers[1]!)}`);
    if (i === undefined || j === undefined) continue;
    if (placed[i]![j] !== undefined) {
      throw new GridError(
        `duplicate grid point (${row.powers[0]}, ${row.powers[1]})`,
      );
    }
    placed[i]![j] = row;
    value[i]![j] = cell(row);
  }

  // Every lattice point inside the triangle must be present.
  let missing = 0;
  for (let i = 0; i < m1.length; i++) {
    for (let j = 0; j < m2.length; j++) {
      const inside = m1[i]! + m2[j]! <= 1 - step + EPS;
      if (inside && placed[i]![j] === undefined) missing++;
      if (!inside && placed[i]![j] !== undefined) {
        throw new GridError(
          `row outside the triangular domain at (${m1[i]}, ${m2[j]})`,
        );
      }
    }
  }
  if (missing > 0) {
    throw new GridError(`incomplete grid: ${missing} lattice points missing`);
  }
  return { step, m1, m2, value, rows: placed };
}

/**
 * Smallest m1 with any profiting configuration for miner 1; the lattice
 * counterpart of the threshold lower bound.
 */
export function profitLowerBound(rows: SweepRow[]): number {
  let best = Infinity;
  for (const row of rows) {
    if (row.means[0]! > row.powers[0]!) best = Math.min(best, row.powers[0]!);
  }
  if (!Number.isFinite(best)) throw new GridError("no profiting row");
  return round6(best);
}
