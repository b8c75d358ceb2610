/**
 * Figure renderers over sweep-results rows.
 *
 * Three kinds cover the simulator's figure families:
 *  - heatmap: per-cell statistic on the (m1, m2) lattice with optional
 *    boundary overlays (two-selfish grids);
 *  - contour: effectiveness regions (how many selfish miners profit)
 *    with the same overlays;
 *  - line: per-miner mean with a 95% CI band against a chosen column
 *    (power sweeps, equal-power scans, convergence against R).
 *
 * Boundary overlays are computed from the data: the profit line is the
 * zero level set of mean_i - m_i for the selected miner, the fair-share
 * line the one of the honest miner's excess.
 */

import { writeFileSync } from "node:fs";

import { sliceRows, SweepRow } from "./csv.js";
import {
  assembleLattice,
  ciOf,
  GridError,
  Lattice,
  meanOf,
  profitOf,
} from "./grid.js";
import { contourMinX, Polyline, zeroContour } from "./marching.js";
import { defaultFrame, rampColor, SvgDoc, ticks, xPix, yPix } from "./svg.js";

export type PlotKind = "heatmap" | "contour" | "line";
export type Boundary = "profit" | "fair";

export interface PlotSpec {
  kind: PlotKind;
  /** 1-based miner whose statistic is plotted / outlined. */
  miner: number;
  /** Cell statistic for heat maps: mean reward or CI half-width. */
  value?: "mean" | "ci";
  /** x column for line plots: a power column or the repetition count. */
  x?: "m1" | "m2" | "m3" | "R";
  boundaries?: Boundary[];
  model?: string;
  k?: number;
  title?: string;
  out: string;
}

export class PlotError extends Error {}

function xValue(row: SweepRow, axis: NonNullable<PlotSpec["x"]>): number {
  if (axis === "R") return row.repetitions;
  const idx = Number(axis.slice(1)) - 1;
  const v = row.powers[idx];
  if (v === undefined) throw new PlotError(`row has no column ${axis}`);
  return v;
}

function boundaryLines(rows: SweepRow[], which: Boundary,
                       miner: number): Polyline[] {
  const honest = rows[0]!.powers.length;
  const target = which === "profit" ? miner : honest;
  const lattice = assembleLattice(rows, profitOf(target));
  return zeroContour(lattice.m1, lattice.m2, lattice.value);
}

/** Extremes of the profit boundary; exposed for analysis cross-checks. */
export function profitBoundaryMinM1(rows: SweepRow[], miner = 1): number {
  const lines = boundaryLines(rows, "profit", miner);
  if (lines.length === 0) throw new PlotError("profit boundary is empty");
  return contourMinX(lines);
}

function drawCells(doc: SvgDoc, lattice: Lattice,
                   color: (v: number) => string): void {
  const half = lattice.step / 2;
  for (let i = 0; i < lattice.m1.length; i++) {
    for (let j = 0; j < lattice.m2.length; j++) {
      const v = lattice.value[i]![j]!;
      if (Number.isNaN(v)) continue;
      const x = xPix(doc.frame, lattice.m1[i]! - half);
      const y = yPix(doc.frame, lattice.m2[j]! + half);
      const w = xPix(doc.frame, lattice.m1[i]! + half) - x;
      const h = yPix(doc.frame, lattice.m2[j]! - half) - y;
      doc.rect(x, y, w, h, color(v));
    }
  }
}

function overlay(doc: SvgDoc, rows: SweepRow[], spec: PlotSpec): void {
  for (const which of spec.boundaries ?? []) {
    const lines = boundaryLines(rows, which, spec.miner);
    for (const line of lines) {
      doc.path(line, "black", 2, which === "fair" ? "6 4" : undefined);
    }
  }
}

function renderHeatmap(rows: SweepRow[], spec: PlotSpec): string {
  const cell = (spec.value ?? "mean") === "mean"
    ? meanOf(spec.miner) : ciOf(spec.miner);
  const lattice = assembleLattice(rows, cell);
  const half = lattice.step / 2;
  const frame = defaultFrame(
    lattice.m1[0]! - half, lattice.m1[lattice.m1.length - 1]! + half,
    lattice.m2[0]! - half, lattice.m2[lattice.m2.length - 1]! + half);
  const doc = new SvgDoc(frame);

  const values = lattice.value.flat().filter((v) => !Number.isNaN(v));
  const lo = Math.min(...values);
  const hi = Math.max(...values);
  const span = hi - lo || 1;
  drawCells(doc, lattice, (v) => rampColor((v - lo) / span));
  overlay(doc, rows, spec);
  doc.axes("miner 1 relative power", "miner 2 relative power",
           ticks(frame.xMin, frame.xMax), ticks(frame.yMin, frame.yMax));
  doc.title(spec.title ??
            `${spec.value ?? "mean"} of miner ${spec.miner} (${rows[0]!.model})`);
  doc.text(frame.width - frame.margin.right, 22,
           `range ${lo.toFixed(3)} to ${hi.toFixed(3)}`, 10, "end");
  return doc.render();
}

function renderContour(rows: SweepRow[], spec: PlotSpec): string {
  // Region shading by how many selfish miners profit: none, some, all.
  const k = rows[0]!.k;
  const lattice = assembleLattice(rows, (row) => {
    let profiting = 0;
    for (let i = 0; i < row.k; i++) {
      if (row.means[i]! > row.powers[i]!) profiting++;
    }
    return profiting;
  });
  const half = lattice.step / 2;
  const frame = defaultFrame(
    lattice.m1[0]! - half, lattice.m1[lattice.m1.length - 1]! + half,
    lattice.m2[0]! - half, lattice.m2[lattice.m2.length - 1]! + half);
  const doc = new SvgDoc(frame);
  drawCells(doc, lattice, (v) => {
    if (v >= k) return "rgb(30,30,30)";
    if (v > 0) return "rgb(150,150,150)";
    return "rgb(235,235,235)";
  });
  overlay(doc, rows, spec);
  doc.axes("miner 1 relative power", "miner 2 relative power",
           ticks(frame.xMin, frame.xMax), ticks(frame.yMin, frame.yMax));
  doc.title(spec.title ?? `profiting selfish miners (${rows[0]!.model})`);
  return doc.render();
}

function renderLine(rows: SweepRow[], spec: PlotSpec): string {
  const axis = spec.x ?? "m1";
  const pts = rows
    .map((row) => ({ x: xValue(row, axis), row }))
    .sort((a, b) => a.x - b.x);
  const xs = pts.map((p) => p.x);
  if (new Set(xs).size !== xs.length) {
    throw new PlotError(`duplicate ${axis} values; filter the input`);
  }
  const n = rows[0]!.powers.length;
  const frame = defaultFrame(xs[0]!, xs[xs.length - 1]!, 0, 1);
  const doc = new SvgDoc(frame);
  const palette = ["rgb(196,78,60)", "rgb(58,110,186)", "rgb(70,150,90)",
                   "rgb(150,100,180)"];
  for (let m = 0; m < n; m++) {
    const means = pts.map((p) => p.row.means[m]!);
    const cis = pts.map((p) => p.row.cis[m]!);
    const color = palette[m % palette.length]!;
    doc.band(xs, means.map((v, i) => v - cis[i]!),
             means.map((v, i) => v + cis[i]!), color);
    doc.path(xs.map((x, i) => ({ x, y: means[i]! })), color, 2);
    doc.text(xPix(doc.frame, xs[xs.length - 1]!) - 6,
             yPix(doc.frame, means[means.length - 1]!) - 6,
             `miner ${m + 1}`, 11, "end");
  }
  if (axis !== "R") {
    // Fair-share reference: reward equal to own power.
    doc.path(xs.map((x) => ({ x, y: x })), "black", 1, "4 4");
  }
  doc.axes(axis === "R" ? "repetitions" : `${axis} relative power`,
           "mean relative reward",
           ticks(frame.xMin, frame.xMax), ticks(0, 1));
  doc.title(spec.title ?? `mean rewards with 95% CI (${rows[0]!.model})`);
  return doc.render();
}

export function render(allRows: SweepRow[], spec: PlotSpec): string {
  const rows = sliceRows(allRows, spec.model, spec.k);
  if (rows.length === 0) throw new PlotError("no rows match the selection");
  if (spec.miner < 1 || spec.miner > rows[0]!.powers.length) {
    throw new PlotError(`miner ${spec.miner} not in the configuration`);
  }
  let svg: string;
  try {
    if (spec.kind === "heatmap") svg = renderHeatmap(rows, spec);
    else if (spec.kind === "contour") svg = renderContour(rows, spec);
    else svg = renderLine(rows, spec);
  } catch (err) {
    if (err instanceof GridError) throw new PlotError(err.message);
    throw err;
  }
  writeFileSync(spec.out, svg);
  return svg;
}
