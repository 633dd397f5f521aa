/**
 * Minimal deterministic SVG plotting.
 *
 * Everything is emitted as plain SVG text with fixed fonts, sizes, and
 * 4-decimal coordinate formatting, so identical inputs produce identical
 * bytes (no timestamps, no randomness, no system font metrics).
 */

export interface Range {
  min: number;
  max: number;
}

export interface PlotFrame {
  width: number;
  height: number;
  margin: { left: number; right: number; top: number; bottom: number };
  x: Range;
  y: Range;
  xLog: boolean;
  yLog: boolean;
}

const FMT = (v: number): string => {
  if (!Number.isFinite(v)) return "0";
  return v.toFixed(4).replace(/\.?0+$/, "") || "0";
};

function scale(v: number, r: Range, lo: number, hi: number, log: boolean): number {
  const t = log
    ? (Math.log10(v) - Math.log10(r.min)) / (Math.log10(r.max) - Math.log10(r.min))
    : (v - r.min) / (r.max - r.min);
  return lo + t * (hi - lo);
}

export class SvgPlot {
  private parts: string[] = [];

  constructor(readonly frame: PlotFrame) {}

  sx(v: number): number {
    const { margin, width, x, xLog } = this.frame;
    return scale(v, x, margin.left, width - margin.right, xLog);
  }

  sy(v: number): number {
    const { margin, height, y, yLog } = this.frame;
    return scale(v, y, height - margin.bottom, margin.top, yLog);
  }

  raw(s: string): void {
    this.parts.push(s);
  }

  line(pts: Array<[number, number]>, stroke: string, dash = ""): void {
    const d = pts
      .filter(([px, py]) => Number.isFinite(px) && Number.isFinite(py))
      .map(([px, py]) => `${FMT(this.sx(px))},${FMT(this.sy(py))}`)
      .join(" ");
    const dashAttr = dash ? ` stroke-dasharray="${dash}"` : "";
    this.parts.push(
      `<polyline fill="none" stroke="${stroke}" stroke-width="1.5"${dashAttr} points="${d}"/>`,
    );
  }

  errorPoints(pts: Array<[number, number, number]>, color: string): void {
    for (const [px, py, pe] of pts) {
      if (!Number.isFinite(px) || !Number.isFinite(py)) continue;
      const cx = FMT(this.sx(px));
      const cy = FMT(this.sy(py));
      if (Number.isFinite(pe) && pe > 0) {
        const y0 = FMT(this.sy(py - pe));
        const y1 = FMT(this.sy(py + pe));
        this.parts.push(
          `<line x1="${cx}" x2="${cx}" y1="${y0}" y2="${y1}" stroke="${color}" stroke-width="1"/>`,
        );
      }
      this.parts.push(`<circle cx="${cx}" cy="${cy}" r="3" fill="${color}"/>`);
    }
  }

  hGuide(yValue: number, stroke: string): void {
    const { margin, width } = this.frame;
    const y = FMT(this.sy(yValue));
    this.parts.push(
      `<line x1="${margin.left}" x2="${width - margin.right}" y1="${y}" y2="${y}" ` +
        `stroke="${stroke}" stroke-width="1" stroke-dasharray="5,4"/>`,
    );
  }

  axes(xLabel: string, yLabel: string, xTicks: number[], yTicks: number[]): void {
    const { margin, width, height } = this.frame;
    const x0 = margin.left;
    const x1 = width - margin.right;
    const y0 = height - margin.bottom;
    const y1 = margin.top;
    this.parts.push(
      `<rect x="${x0}" y="${y1}" width="${x1 - x0}" height="${y0 - y1}" ` +
        `fill="none" stroke="#222" stroke-width="1"/>`,
    );
    for (const t of xTicks) {
      const x = FMT(this.sx(t));
      this.parts.push(
        `<line x1="${x}" x2="${x}" y1="${y0}" y2="${y0 + 5}" stroke="#222" stroke-width="1"/>`,
        `<text x="${x}" y="${y0 + 18}" font-family="sans-serif" font-size="11" ` +
          `text-anchor="middle" fill="#222">${FMT(t)}</text>`,
      );
    }
    for (const t of yTicks) {
      const y = FMT(this.sy(t));
      this.parts.push(
        `<line x1="${x0 - 5}" x2="${x0}" y1="${y}" y2="${y}" stroke="#222" stroke-width="1"/>`,
        `<text x="${x0 - 8}" y="${y}" font-family="sans-serif" font-size="11" ` +
          `text-anchor="end" dominant-baseline="middle" fill="#222">${FMT(t)}</text>`,
      );
    }
    const xc = FMT((x0 + x1) / 2);
    this.parts.push(
      `<text x="${xc}" y="${height - 8}" font-family="sans-serif" font-size="13" ` +
        `text-anchor="middle" fill="#222">${xLabel}</text>`,
      `<text x="14" y="${FMT((y0 + y1) / 2)}" font-family="sans-serif" font-size="13" ` +
        `text-anchor="middle" fill="#222" transform="rotate(-90 14 ${FMT((y0 + y1) / 2)})">${yLabel}</text>`,
    );
  }

  legend(entries: Array<[string, string]>): void {
    const { margin, width } = this.frame;
    let y = margin.top + 14;
    const x = width - margin.right - 150;
    for (const [label, color] of entries) {
      this.parts.push(
        `<line x1="${x}" x2="${x + 18}" y1="${y - 4}" y2="${y - 4}" stroke="${color}" stroke-width="2"/>`,
        `<text x="${x + 24}" y="${y}" font-family="sans-serif" font-size="11" fill="#222">${label}</text>`,
      );
      y += 16;
    }
  }

  title(text: string): void {
    const { width } = this.frame;
    this.parts.push(
      `<text x="${FMT(width / 2)}" y="18" font-family="sans-serif" font-size="14" ` +
        `text-anchor="middle" fill="#222">${text}</text>`,
    );
  }

  render(): string {
    const { width, height } = this.frame;
    return (
      `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" ` +
      `viewBox="0 0 ${width} ${height}">\n<rect width="${width}" height="${height}" fill="white"/>\n` +
      this.parts.join("\n") +
      "\n</svg>\n"
    );
  }
}

export function niceTicks(r: Range, n = 5): number[] {
  const span = r.max - r.min;
  if (!(span > 0)) return [r.min];
  const step0 = span / n;
  const mag = Math.pow(10, Math.floor(Math.log10(step0)));
  const step = [1, 2, 5, 10].map((m) => m * mag).find((s) => span / s <= n + 1) ?? mag * 10;
  const start = Math.ceil(r.min / step) * step;
  const out: number[] = [];
  for (let v = start; v <= r.max + 1e-12 * span; v += step) out.push(Number(v.toPrecision(12)));
  return out;
}
