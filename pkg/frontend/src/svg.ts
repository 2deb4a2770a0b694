/** Minimal deterministic SVG scene builder: fixed styling, fixed number
 *  formatting, no timestamps, so identical inputs give identical bytes. */

export interface Extent {
  min: number;
  max: number;
}

export function extent(values: number[], pad = 0.06): Extent {
  let min = Math.min(...values);
  let max = Math.max(...values);
  if (!(Number.isFinite(min) && Number.isFinite(max))) {
    throw new Error("non-finite plot values");
  }
  if (min === max) {
    min -= 1;
    max += 1;
  }
  const span = max - min;
  return { min: min - pad * span, max: max + pad * span };
}

export class LinearScale {
  constructor(
    readonly domain: Extent,
    readonly range: [number, number],
  ) {}

  apply(v: number): number {
    const t = (v - this.domain.min) / (this.domain.max - this.domain.min);
    return this.range[0] + t * (this.range[1] - this.range[0]);
  }

  ticks(count = 5): number[] {
    const span = this.domain.max - this.domain.min;
    const step = niceStep(span / count);
    const first = Math.ceil(this.domain.min / step) * step;
    const out: number[] = [];
    for (let v = first; v <= this.domain.max + 1e-12 * span; v += step) {
      out.push(v);
    }
    return out;
  }
}

function niceStep(raw: number): number {
  const mag = Math.pow(10, Math.floor(Math.log10(raw)));
  const norm = raw / mag;
  const nice = norm < 1.5 ? 1 : norm < 3.5 ? 2 : norm < 7.5 ? 5 : 10;
  return nice * mag;
}

export function fmt(v: number): string {
  if (v === 0) return "0";
  const a = Math.abs(v);
  const s = a >= 0.001 && a < 100000 ? v.toPrecision(6) : v.toExponential(4);
  return s.replace(/(\.\d*?)0+(?=$|e)/, "$1").replace(/\.(?=$|e)/, "");
}

const WIDTH = 640;
const HEIGHT = 440;
const MARGIN = { left: 70, right: 20, top: 36, bottom: 52 };

export const PALETTE = ["#1f6aa5", "#c2452d", "#3a8f4e", "#7b5aa6", "#b58a2a"];

export class Figure {
  private parts: string[] = [];
  readonly x: LinearScale;
  readonly y: LinearScale;

  constructor(
    xDomain: Extent,
    yDomain: Extent,
    readonly title: string,
    readonly xLabel: string,
    readonly yLabel: string,
  ) {
    this.x = new LinearScale(xDomain, [MARGIN.left, WIDTH - MARGIN.right]);
    this.y = new LinearScale(yDomain, [HEIGHT - MARGIN.bottom, MARGIN.top]);
  }

  private px(v: number): string {
    return v.toFixed(2);
  }

  line(xs: number[], ys: number[], color: string, width = 1.6, dash = ""): void {
    const pts = xs
      .map((v, i) => `${this.px(this.x.apply(v))},${this.px(this.y.apply(ys[i]))}`)
      .join(" ");
    const dashAttr = dash ? ` stroke-dasharray="${dash}"` : "";
    this.parts.push(
      `<polyline fill="none" stroke="${color}" stroke-width="${width}"${dashAttr} points="${pts}"/>`,
    );
  }

  points(xs: number[], ys: number[], color: string, r = 3.2): void {
    for (let i = 0; i < xs.length; i++) {
      this.parts.push(
        `<circle cx="${this.px(this.x.apply(xs[i]))}" cy="${this.px(this.y.apply(ys[i]))}" r="${r}" fill="${color}"/>`,
      );
    }
  }

  errorBars(xs: number[], ys: number[], err: number[], color: string): void {
    for (let i = 0; i < xs.length; i++) {
      const cx = this.px(this.x.apply(xs[i]));
      const lo = this.px(this.y.apply(ys[i] - err[i]));
      const hi = this.px(this.y.apply(ys[i] + err[i]));
      this.parts.push(
        `<line x1="${cx}" y1="${lo}" x2="${cx}" y2="${hi}" stroke="${color}" stroke-width="1.2"/>`,
      );
    }
  }

  vline(xv: number, color: string, label = ""): void {
    const cx = this.px(this.x.apply(xv));
    const y0 = this.px(this.y.range[0]);
    const y1 = this.px(this.y.range[1]);
    this.parts.push(
      `<line x1="${cx}" y1="${y0}" x2="${cx}" y2="${y1}" stroke="${color}" stroke-width="1" stroke-dasharray="4 3"/>`,
    );
    if (label) {
      this.parts.push(
        `<text x="${cx}" y="${this.px(MARGIN.top - 6)}" font-size="11" text-anchor="middle" fill="${color}">${label}</text>`,
      );
    }
  }

  annotate(text: string, slot = 0): void {
    const y = MARGIN.top + 16 + slot * 15;
    this.parts.push(
      `<text x="${WIDTH - MARGIN.right - 6}" y="${y}" font-size="12" text-anchor="end" fill="#333">${text}</text>`,
    );
  }

  legend(entries: [string, string][]): void {
    entries.forEach(([label, color], i) => {
      const y = MARGIN.top + 16 + i * 16;
      this.parts.push(
        `<rect x="${MARGIN.left + 8}" y="${y - 9}" width="12" height="4" fill="${color}"/>`,
        `<text x="${MARGIN.left + 26}" y="${y}" font-size="12" fill="#333">${label}</text>`,
      );
    });
  }

  render(): string {
    const axes: string[] = [];
    const x0 = MARGIN.left;
    const x1 = WIDTH - MARGIN.right;
    const y0 = HEIGHT - MARGIN.bottom;
    const y1 = MARGIN.top;
    for (const t of this.x.ticks()) {
      const cx = this.px(this.x.apply(t));
      axes.push(
        `<line x1="${cx}" y1="${y0}" x2="${cx}" y2="${y1}" stroke="#eee" stroke-width="1"/>`,
        `<text x="${cx}" y="${y0 + 18}" font-size="11" text-anchor="middle" fill="#444">${fmt(t)}</text>`,
      );
    }
    for (const t of this.y.ticks()) {
      const cy = this.px(this.y.apply(t));
      axes.push(
        `<line x1="${x0}" y1="${cy}" x2="${x1}" y2="${cy}" stroke="#eee" stroke-width="1"/>`,
        `<text x="${x0 - 8}" y="${cy}" font-size="11" text-anchor="end" dominant-baseline="middle" fill="#444">${fmt(t)}</text>`,
      );
    }
    return [
      `<svg xmlns="http://www.w3.org/2000/svg" width="${WIDTH}" height="${HEIGHT}" viewBox="0 0 ${WIDTH} ${HEIGHT}" font-family="sans-serif">`,
      `<rect width="${WIDTH}" height="${HEIGHT}" fill="white"/>`,
      ...axes,
      `<rect x="${x0}" y="${y1}" width="${x1 - x0}" height="${y0 - y1}" fill="none" stroke="#444" stroke-width="1"/>`,
      `<text x="${(x0 + x1) / 2}" y="${y1 - 14}" font-size="14" text-anchor="middle" fill="#111">${this.title}</text>`,
      `<text x="${(x0 + x1) / 2}" y="${HEIGHT - 12}" font-size="12" text-anchor="middle" fill="#222">${this.xLabel}</text>`,
      `<text x="16" y="${(y0 + y1) / 2}" font-size="12" text-anchor="middle" fill="#222" transform="rotate(-90 16 ${(y0 + y1) / 2})">${this.yLabel}</text>`,
      ...this.parts,
      `</svg>`,
      ``,
    ].join("\n");
  }
}

export function linearFit(xs: number[], ys: number[]): { slope: number; intercept: number; r2: number } {
  const n = xs.length;
  const mx = xs.reduce((a, b) => a + b, 0) / n;
  const my = ys.reduce((a, b) => a + b, 0) / n;
  let sxx = 0;
  let sxy = 0;
  let syy = 0;
  for (let i = 0; i < n; i++) {
    sxx += (xs[i] - mx) ** 2;
    sxy += (xs[i] - mx) * (ys[i] - my);
    syy += (ys[i] - my) ** 2;
  }
  const slope = sxy / sxx;
  const intercept = my - slope * mx;
  const r2 = syy === 0 ? 1 : (sxy * sxy) / (sxx * syy);
  return { slope, intercept, r2 };
}
