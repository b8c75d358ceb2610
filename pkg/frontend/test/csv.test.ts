import { describe, expect, it } from "vitest";

import { CsvError, HEADER, parseResults, sliceRows } from "../src/csv.js";
import { fixtureCsv } from "./fixture.js";

describe("results CSV parsing", () => {
  it("parses fixture rows with powers, stats, and metadata", () => {
    const rows = parseResults(fixtureCsv({ step: 0.2 }));
    expect(rows.length).toBe(6);
    const first = rows[0]!;
    expect(first.model).toBe("concurrent");
    expect(first.k).toBe(2);
    expect(first.powers.length).toBe(3);
    expect(first.means.length).toBe(3);
    expect(first.repetitions).toBe(10);
    expect(first.seed).toBe(7n);
  });

  it("rejects a wrong header on line 1", () => {
    expect(() => parseResults("model,k\n")).toThrowError(/line 1/);
  });

  it("reports the offending line number", () => {
    const lines = fixtureCsv({ step: 0.2 }).trim().split("\n");
    lines[3] = lines[3]!.replace("concurrent", "quantum");
    expect(() => parseResults(lines.join("\n"))).toThrowError(/line 4/);
    const bad = fixtureCsv({ step: 0.2 }).trim().split("\n");
    bad[2] = bad[2] + ",9";
    expect(() => parseResults(bad.join("\n"))).toThrowError(/18 columns/);
  });

  it("round trips the header constant", () => {
    expect(fixtureCsv().split("\n")[0]).toBe(HEADER);
  });

  it("slices by model and selfish count", () => {
    const rows = parseResults(fixtureCsv({ step: 0.2 }));
    expect(sliceRows(rows, "conventional").length).toBe(0);
    expect(sliceRows(rows, "concurrent", 2).length).toBe(6);
    expect(sliceRows(rows, undefined, 1).length).toBe(0);
  });

  it("rejects inconsistent miner columns", () => {
    const lines = fixtureCsv({ step: 0.2 }).trim().split("\n");
    const cells = lines[1]!.split(",");
    cells[12] = "";          // drop mean_3 while powers keep 3 miners
    lines[1] = cells.join(",");
    expect(() => parseResults(lines.join("\n"))).toThrowError(CsvError);
  });
});
