/**
 * Minimal SVG builders: enough for publication-style heat maps, region
 * plots, and mean/CI line charts without a DOM or plotting library.
 */

export interface Frame {
  width: number;
  height: number;
  margin: { top: number; right: number; bottom: number; left: number };
  xMin: number;
  xMax: number;
  yMin: number;
  yMax: number;
}

export function defaultFrame(
  xMin: number,
  xMax: number,
  yMin: number,
  yMax: number,
): Frame {
  return {
    width: 640,
    height: 520,
    margin: { top: 40, right: 30, bottom: 50, left: 60 },
    xMin,
    xMax,
    yMin,
    yMax,
  };
}

export function xPix(f: Frame, x: number): number {
  const inner = f.width - f.margin.left - f.margin.right;
  return f.margin.left + ((x - f.xMin) / (f.xMax - f.xMin)) * inner;
}

export function yPix(f: Frame, y: number): number {
  const inner = f.height - f.margin.top - f.margin.bottom;
  return f.height - f.margin.bottom - ((y - f.yMin) / (f.yMax - f.yMin)) * inner;
}

function esc(s: string): string {
  return s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}

/** Two-stop(ish) sequential ramp from deep blue to warm yellow. */
export function rampColor(t: number): string {
  const clamped = Math.max(0, Math.min(1, t));
  const stops: [number, [number, number, number]][] = [
    [0.0, [28, 44, 120]],
    [0.5, [46, 140, 140]],
    [1.0, [250, 220, 80]],
  ];
  for (let i = 0; i < stops.length - 1; i++) {
    const [t0, c0] = stops[i]!;
    const [t1, c1] = stops[i + 1]!;
    if (clamped <= t1) {
      const u = (clamped - t0) / (t1 - t0);
      const mix = c0.map((a, ch) => Math.round(a + u * (c1[ch]! - a)));
      return `rgb(${mix[0]},${mix[1]},${mix[2]})`;
    }
  }
  return "rgb(250,220,80)";
}

export class SvgDoc {
  private parts: string[] = [];

  constructor(readonly frame: Frame) {}

  rect(x: number, y: number, w: number, h: number, fill: string,
       opacity = 1): void {
    this.parts.push(
      `<rect x="${x.toFixed(2)}" y="${y.toFixed(2)}" width="${w.toFixed(2)}"` +
        ` height="${h.toFixed(2)}" fill="${fill}" fill-opacity="${opacity}"/>`,
    );
  }

  path(points: { x: number; y: number }[], stroke: string, width = 1.5,
       dash?: string, fill = "none", opacity = 1): void {
    if (points.length === 0) return;
    const d = points
      .map((p, i) =>
        `${i === 0 ? "M" : "L"}${xPix(this.frame, p.x).toFixed(2)},` +
        `${yPix(this.frame, p.y).toFixed(2)}`)
      .join(" ");
    const dashAttr = dash ? ` stroke-dasharray="${dash}"` : "";
    this.parts.push(
      `<path d="${d}" fill="${fill}" fill-opacity="${opacity}"` +
        ` stroke="${stroke}" stroke-width="${width}"${dashAttr}/>`,
    );
  }

  band(xs: number[], lows: number[], highs: number[], fill: string,
       opacity = 0.25): void {
    const up = xs.map((x, i) => ({ x, y: highs[i]! }));
    const down = xs.map((x, i) => ({ x, y: lows[i]! })).reverse();
    this.path([...up, ...down], "none", 0, undefined, fill, opacity);
  }

  text(x: number, y: number, label: string, size = 12, anchor = "middle",
       rotate?: number): void {
    const transform = rotate !== undefined
      ? ` transform="rotate(${rotate} ${x.toFixed(1)} ${y.toFixed(1)})"`
      : "";
    this.parts.push(
      `<text x="${x.toFixed(1)}" y="${y.toFixed(1)}" font-size="${size}"` +
        ` font-family="sans-serif" text-anchor="${anchor}"${transform}>` +
        `${esc(label)}</text>`,
    );
  }

  axes(xLabel: string, yLabel: string, xTicks: number[], yTicks: number[]): void {
    const f = this.frame;
    const x0 = f.margin.left;
    const x1 = f.width - f.margin.right;
    const y0 = f.height - f.margin.bottom;
    const y1 = f.margin.top;
    this.parts.push(
      `<line x1="${x0}" y1="${y0}" x2="${x1}" y2="${y0}" stroke="black"/>`,
      `<line x1="${x0}" y1="${y0}" x2="${x0}" y2="${y1}" stroke="black"/>`,
    );
    for (const t of xTicks) {
      const px = xPix(f, t);
      this.parts.push(
        `<line x1="${px.toFixed(1)}" y1="${y0}" x2="${px.toFixed(1)}"` +
          ` y2="${y0 + 4}" stroke="black"/>`,
      );
      this.text(px, y0 + 18, t.toFixed(2), 11);
    }
    for (const t of yTicks) {
      const py = yPix(f, t);
      this.parts.push(
        `<line x1="${x0 - 4}" y1="${py.toFixed(1)}" x2="${x0}"` +
          ` y2="${py.toFixed(1)}" stroke="black"/>`,
      );
      this.text(x0 - 8, py + 4, t.toFixed(2), 11, "end");
    }
    this.text((x0 + x1) / 2, f.height - 12, xLabel, 13);
    this.text(16, (y0 + y1) / 2, yLabel, 13, "middle", -90);
  }

  title(label: string): void {
    this.text(this.frame.width / 2, 22, label, 15);
  }

  render(): string {
    const f = this.frame;
    return (
      `<svg xmlns="http://www.w3.org/2000/svg" width="${f.width}"` +
      ` height="${f.height}" viewBox="0 0 ${f.width} ${f.height}">\n` +
      `<rect width="${f.width}" height="${f.height}" fill="white"/>\n` +
      this.parts.join("\n") +
      "\n</svg>\n"
    );
  }
}

export function ticks(min: number, max: number, count = 6): number[] {
  const span = max - min;
  const rawStep = span / count;
  const mag = 10 ** Math.floor(Math.log10(rawStep));
  const step = [1, 2, 5, 10].map((m) => m * mag)
    .find((s) => span / s <= count) ?? mag * 10;
  const out: number[] = [];
  for (let t = Math.ceil(min / step) * step; t <= max + 1e-12; t += step) {
    out.push(Math.round(t * 1e9) / 1e9);
  }
  return out;
}
