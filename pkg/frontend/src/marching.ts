/**
 * Marching-squares zero-contour extraction over an irregular lattice.
 *
 * Cells with any NaN corner are skipped, which clips the contour to the
 * populated (triangular) part of a sweep lattice. Returns polylines in
 * data coordinates; segments are stitched into chains where endpoints
 * coincide.
 */

export interface Point {
  x: number;
  y: number;
}

export type Polyline = Point[];

interface Segment {
  a: Point;
  b: Point;
}

function interp(
  x1: number,
  y1: number,
  v1: number,
  x2: number,
  y2: number,
  v2: number,
): Point {
  const t = v1 === v2 ? 0.5 : v1 / (v1 - v2);
  return { x: x1 + t * (x2 - x1), y: y1 + t * (y2 - y1) };
}

/**
 * Zero contour of value[i][j] sampled at (xs[i], ys[j]).
 */
export function zeroContour(
  xs: number[],
  ys: number[],
  value: number[][],
): Polyline[] {
  const segments: Segment[] = [];
  for (let i = 0; i < xs.length - 1; i++) {
    for (let j = 0; j < ys.length - 1; j++) {
      const v00 = value[i]![j]!;
      const v10 = value[i + 1]![j]!;
      const v01 = value[i]![j + 1]!;
      const v11 = value[i + 1]![j + 1]!;
      if ([v00, v10, v01, v11].some((v) => Number.isNaN(v))) continue;

      const x0 = xs[i]!;
      const x1 = xs[i + 1]!;
      const y0 = ys[j]!;
      const y1 = ys[j + 1]!;

      // Corner sign mask; treat exact zero as positive so a flat zero
      // plateau does not emit degenerate segments.
      let mask = 0;
      if (v00 > 0) mask |= 1;
      if (v10 > 0) mask |= 2;
      if (v11 > 0) mask |= 4;
      if (v01 > 0) mask |= 8;
      if (mask === 0 || mask === 15) continue;

      const bottom = () => interp(x0, y0, v00, x1, y0, v10);
      const top = () => interp(x0, y1, v01, x1, y1, v11);
      const left = () => interp(x0, y0, v00, x0, y1, v01);
      const right = () => interp(x1, y0, v10, x1, y1, v11);

      const edges: [Point, Point][] = [];
      switch (mask) {
        case 1:
        case 14:
          edges.push([left(), bottom()]);
          break;
        case 2:
        case 13:
          edges.push([bottom(), right()]);
          break;
        case 3:
        case 12:
          edges.push([left(), right()]);
          break;
        case 4:
        case 11:
          edges.push([right(), top()]);
          break;
        case 6:
        case 9:
          edges.push([bottom(), top()]);
          break;
        case 7:
        case 8:
          edges.push([left(), top()]);
          break;
        case 5: // saddle: pick the pairing consistent with the center sign
        case 10: {
          const center = (v00 + v10 + v01 + v11) / 4;
          const positiveCenter = center > 0;
          if ((mask === 5) === positiveCenter) {
            edges.push([left(), bottom()], [right(), top()]);
          } else {
            edges.push([left(), top()], [right(), bottom()]);
          }
          break;
        }
      }
      for (const [a, b] of edges) segments.push({ a, b });
    }
  }
  return stitch(segments);
}

function key(p: Point): string {
  return `${p.x.toFixed(9)}|${p.y.toFixed(9)}`;
}

/** Join segments that share endpoints into maximal polylines. */
function stitch(segments: Segment[]): Polyline[] {
  const unused = new Set(segments.map((_, i) => i));
  const byEnd = new Map<string, number[]>();
  segments.forEach((s, i) => {
    for (const p of [s.a, s.b]) {
      const k = key(p);
      if (!byEnd.has(k)) byEnd.set(k, []);
      byEnd.get(k)!.push(i);
    }
  });

  const takeFrom = (p: Point): Segment | undefined => {
    for (const i of byEnd.get(key(p)) ?? []) {
      if (unused.has(i)) {
        unused.delete(i);
        return segments[i];
      }
    }
    return undefined;
  };

  const lines: Polyline[] = [];
  while (unused.size > 0) {
    const first = unused.values().next().value as number;
    unused.delete(first);
    const seg = segments[first]!;
    const line: Polyline = [seg.a, seg.b];
    // extend forward
    for (;;) {
      const next = takeFrom(line[line.length - 1]!);
      if (!next) break;
      const tail = line[line.length - 1]!;
      line.push(key(next.a) === key(tail) ? next.b : next.a);
    }
    // extend backward
    for (;;) {
      const prev = takeFrom(line[0]!);
      if (!prev) break;
      const head = line[0]!;
      line.unshift(key(prev.a) === key(head) ? prev.b : prev.a);
    }
    lines.push(line);
  }
  return lines;
}

/** Smallest x reached by any contour point. */
export function contourMinX(lines: Polyline[]): number {
  let min = Infinity;
  for (const line of lines) {
    for (const p of line) min = Math.min(min, p.x);
  }
  return min;
}
