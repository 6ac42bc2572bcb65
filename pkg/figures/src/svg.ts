/** Minimal deterministic SVG plotting helpers (no DOM, no dependencies). */

export interface Scale {
  (v: number): number;
  domain: [number, number];
  range: [number, number];
}

export function linearScale(domain: [number, number], range: [number, number]): Scale {
  const [d0, d1] = domain;
  const [r0, r1] = range;
  const span = d1 - d0 || 1;
  const f = ((v: number) => r0 + ((v - d0) / span) * (r1 - r0)) as Scale;
  f.domain = domain;
  f.range = range;
  return f;
}

export function extent(values: number[]): [number, number] {
  let lo = Infinity;
  let hi = -Infinity;
  for (const v of values) {
    if (v < lo) lo = v;
    if (v > hi) hi = v;
  }
  return [lo, hi];
}

/** Round-numbered tick positions covering the domain. */
export function ticks(domain: [number, number], count = 5): number[] {
  const span = domain[1] - domain[0];
  if (span <= 0) return [domain[0]];
  const raw = span / count;
  const mag = Math.pow(10, Math.floor(Math.log10(raw)));
  const candidates = [1, 2, 2.5, 5, 10].map((m) => m * mag);
  const step = candidates.find((s) => span / s <= count + 0.5) ?? candidates[4];
  const start = Math.ceil(domain[0] / step) * step;
  const out: number[] = [];
  for (let v = start; v <= domain[1] + 1e-12 * span; v += step) {
    out.push(Math.abs(v) < step * 1e-9 ? 0 : v);
  }
  return out;
}

export function fmt(v: number): string {
  if (v === 0) return "0";
  const a = Math.abs(v);
  if (a >= 1e4 || a < 1e-3) return v.toExponential(1);
  return String(parseFloat(v.toPrecision(6)));
}

const esc = (s: string) =>
  s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");

export class SvgBuilder {
  private parts: string[] = [];

  constructor(readonly width: number, readonly height: number) {
    this.parts.push(
      `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" ` +
        `viewBox="0 0 ${width} ${height}" font-family="Helvetica, Arial, sans-serif">`,
      `<rect width="${width}" height="${height}" fill="white"/>`,
    );
  }

  raw(s: string): void {
    this.parts.push(s);
  }

  line(x1: number, y1: number, x2: number, y2: number, style: string): void {
    this.parts.push(
      `<line x1="${r(x1)}" y1="${r(y1)}" x2="${r(x2)}" y2="${r(y2)}" ${style}/>`,
    );
  }

  polyline(pts: Array<[number, number]>, style: string): void {
    const d = pts.map(([x, y]) => `${r(x)},${r(y)}`).join(" ");
    this.parts.push(`<polyline points="${d}" fill="none" ${style}/>`);
  }

  circle(x: number, y: number, radius: number, style: string): void {
    this.parts.push(`<circle cx="${r(x)}" cy="${r(y)}" r="${radius}" ${style}/>`);
  }

  rect(x: number, y: number, w: number, h: number, style: string): void {
    this.parts.push(
      `<rect x="${r(x)}" y="${r(y)}" width="${r(w)}" height="${r(h)}" ${style}/>`,
    );
  }

  text(x: number, y: number, s: string, style = ""): void {
    this.parts.push(`<text x="${r(x)}" y="${r(y)}" font-size="11" ${style}>${esc(s)}</text>`);
  }

  toString(): string {
    return this.parts.join("\n") + "\n</svg>\n";
  }
}

function r(v: number): string {
  return String(Math.round(v * 100) / 100);
}

export interface Frame {
  x: Scale;
  y: Scale;
}

/** Draw axes with ticks and labels; returns the data-area scales. */
export function axes(
  svg: SvgBuilder,
  xDomain: [number, number],
  yDomain: [number, number],
  labels: { x: string; y: string; title?: string },
  margin = { left: 62, right: 18, top: 26, bottom: 44 },
): Frame {
  const x = linearScale(xDomain, [margin.left, svg.width - margin.right]);
  const y = linearScale(yDomain, [svg.height - margin.bottom, margin.top]);
  const stroke = 'stroke="black" stroke-width="1"';
  svg.line(x.range[0], y.range[0], x.range[1], y.range[0], stroke);
  svg.line(x.range[0], y.range[0], x.range[0], y.range[1], stroke);
  for (const t of ticks(xDomain)) {
    svg.line(x(t), y.range[0], x(t), y.range[0] + 4, stroke);
    svg.text(x(t), y.range[0] + 16, fmt(t), 'text-anchor="middle"');
  }
  for (const t of ticks(yDomain)) {
    svg.line(x.range[0] - 4, y(t), x.range[0], y(t), stroke);
    svg.text(x.range[0] - 7, y(t) + 4, fmt(t), 'text-anchor="end"');
  }
  svg.text(
    (x.range[0] + x.range[1]) / 2,
    svg.height - 10,
    labels.x,
    'text-anchor="middle" font-size="12"',
  );
  svg.raw(
    `<text x="14" y="${(y.range[0] + y.range[1]) / 2}" font-size="12" text-anchor="middle" ` +
      `transform="rotate(-90 14 ${(y.range[0] + y.range[1]) / 2})">${esc(labels.y)}</text>`,
  );
  if (labels.title) {
    svg.text((x.range[0] + x.range[1]) / 2, 16, labels.title, 'text-anchor="middle" font-size="12"');
  }
  return { x, y };
}

/** Blue-white-red style survival colormap on a fixed [0, 1] domain. */
export function survivalColor(p: number): string {
  const t = Math.min(1, Math.max(0, p));
  // dark blue (0) -> white-ish (0.5) -> dark red (1): perceptually simple
  const stops: Array<[number, [number, number, number]]> = [
    [0.0, [33, 52, 104]],
    [0.5, [240, 240, 240]],
    [1.0, [148, 23, 30]],
  ];
  let k = 0;
  while (k < stops.length - 2 && t > stops[k + 1][0]) k++;
  const [t0, c0] = stops[k];
  const [t1, c1] = stops[k + 1];
  const u = (t - t0) / (t1 - t0);
  const c = c0.map((a, i) => Math.round(a + u * (c1[i] - a)));
  return `rgb(${c[0]},${c[1]},${c[2]})`;
}
