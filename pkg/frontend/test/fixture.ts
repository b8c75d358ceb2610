/** Synthetic two-selfish sweep with an analytically known profit edge. */

import { HEADER } from "../src/csv.js";

export interface FixtureOptions {
  step?: number;
  /** Miner 1 profits exactly when m1 exceeds this value. */
  edge?: number;
  model?: string;
}

export function fixtureCsv(options: FixtureOptions = {}): string {
  const step = options.step ?? 0.01;
  const edge = options.edge ?? 0.285;
  const model = options.model ?? "concurrent";
  const cells = Math.round(1 / step);
  const lines = [HEADER];
  for (let i = 1; i < cells; i++) {
    for (let j = 1; j + i <= cells - 1; j++) {
      const m1 = i / cells;
      const m2 = j / cells;
      const honest = (cells - i - j) / cells;
      // Smooth excess crossing zero at m1 = edge; m2 profits nowhere.
      const mean1 = m1 + 0.5 * (m1 - edge);
      const mean2 = m2 - 0.02;
      const mean3 = 1 - mean1 - mean2;
      const f = (x: number) => x.toFixed(6);
      lines.push([
        model, "2", f(m1), f(m2), f(honest), "", f(0.5), "1000", "10", "7",
        f(mean1), f(mean2), f(mean3), "", f(0.004), f(0.004), f(0.004), "",
      ].join(","));
    }
  }
  return lines.join("\n") + "\n";
}

export function dropRow(csv: string, contains: string): string {
  return csv
    .split("\n")
    .filter((line) => !line.includes(contains))
    .join("\n");
}
