/** The three figure kinds rendered from drivephase CLI CSV outputs. */
import { CsvError, Table, column } from "./csv.js";
import { SvgBuilder, axes, extent, fmt, linearScale, survivalColor } from "./svg.js";

export const FIGURE_KINDS = ["train-scan", "compensation-map", "rb-error"] as const;
export type FigureKind = (typeof FIGURE_KINDS)[number];

const TWO_PI = 2 * Math.PI;
const toMilliTurns = (rad: number) => (rad / TWO_PI) * 1e3;

/** Survival vs pulse amplitude: the revival comb with its dip at A = 1. */
export function renderTrainScan(table: Table): string {
  const a = column(table, "A");
  const p0 = column(table, "P0");
  const svg = new SvgBuilder(640, 400);
  const frame = axes(svg, extent(a), [0, 1.05], {
    x: "pulse amplitude A",
    y: "P(|0⟩)",
    title: "pulse-train survival vs amplitude",
  });
  svg.polyline(
    a.map((v, i) => [frame.x(v), frame.y(p0[i])] as [number, number]),
    'stroke="#1f4e96" stroke-width="1.2"',
  );
  for (let i = 0; i < a.length; i++) {
    svg.circle(frame.x(a[i]), frame.y(p0[i]), 1.6, 'fill="#1f4e96"');
  }
  return svg.toString();
}

interface Grid {
  xs: number[];
  ys: number[];
  val: Map<string, number>;
}

function pivot(x: number[], y: number[], v: number[]): Grid {
  const xs = [...new Set(x)].sort((p, q) => p - q);
  const ys = [...new Set(y)].sort((p, q) => p - q);
  const val = new Map<string, number>();
  for (let i = 0; i < v.length; i++) {
    val.set(`${x[i]}|${y[i]}`, v[i]);
  }
  return { xs, ys, val };
}

/** 2-D survival heat map over (A, phi_c') with labeled transects. */
export function renderCompensationMap(table: Table): string {
  const a = column(table, "A");
  const phic = column(table, "phi_c_prime");
  const p0 = column(table, "P0");
  const grid = pivot(a, phic, p0);
  if (grid.xs.length < 2 || grid.ys.length < 2) {
    throw new CsvError("compensation-map needs a 2-D grid");
  }

  const svg = new SvgBuilder(640, 460);
  const yVals = grid.ys.map(toMilliTurns);
  const frame = axes(
    svg,
    extent(grid.xs),
    extent(yVals),
    {
      x: "pulse amplitude A",
      y: "compensation slope (2π×10⁻³ rad)",
      title: "survival map: amplitude vs phase compensation",
    },
    { left: 62, right: 96, top: 26, bottom: 44 },
  );

  const dx = (frame.x.range[1] - frame.x.range[0]) / grid.xs.length;
  const dy = (frame.y.range[0] - frame.y.range[1]) / grid.ys.length;
  for (let i = 0; i < grid.xs.length; i++) {
    for (let j = 0; j < grid.ys.length; j++) {
      const p = grid.val.get(`${grid.xs[i]}|${grid.ys[j]}`);
      if (p === undefined) continue;
      svg.rect(
        frame.x.range[0] + i * dx,
        frame.y.range[1] + (grid.ys.length - 1 - j) * dy,
        dx + 0.5,
        dy + 0.5,
        `fill="${survivalColor(p)}"`,
      );
    }
  }

  // transects: accentuated / native (if present) / compensated rows
  const rowMean = grid.ys.map((yv) =>
    grid.xs.reduce((s, xv) => s + (grid.val.get(`${xv}|${yv}`) ?? 0), 0) / grid.xs.length,
  );
  const marks: Array<[number, string]> = [
    [grid.ys[rowMean.indexOf(Math.min(...rowMean))], "accentuated"],
    [grid.ys[rowMean.indexOf(Math.max(...rowMean))], "compensated"],
  ];
  const zero = grid.ys.find((v) => v === 0);
  if (zero !== undefined) marks.push([zero, "native"]);
  for (const [yv, label] of marks) {
    const ypix = frame.y(toMilliTurns(yv));
    svg.line(
      frame.x.range[0],
      ypix,
      frame.x.range[1],
      ypix,
      'stroke="black" stroke-width="0.8" stroke-dasharray="5,3"',
    );
    svg.text(frame.x.range[1] + 4, ypix + 4, label, 'font-size="10"');
  }

  // fixed [0, 1] color bar
  const barX = svg.width - 58;
  const barTop = frame.y.range[1];
  const barH = frame.y.range[0] - frame.y.range[1];
  const steps = 64;
  for (let k = 0; k < steps; k++) {
    const p = 1 - k / (steps - 1);
    svg.rect(barX, barTop + (k * barH) / steps, 12, barH / steps + 0.5, `fill="${survivalColor(p)}"`);
  }
  svg.rect(barX, barTop, 12, barH, 'fill="none" stroke="black" stroke-width="0.8"');
  svg.text(barX + 16, barTop + 9, "1");
  svg.text(barX + 16, barTop + barH, "0");
  svg.text(barX + 6, barTop - 8, "P(|0⟩)", 'text-anchor="middle" font-size="10"');
  return svg.toString();
}

/** Error per Clifford vs compensation slope (log scale, quadratic bowl). */
export function renderRbError(table: Table): string {
  const phic = column(table, "phi_c_prime");
  const epc = column(table, "error_per_clifford");
  const xs = phic.map(toMilliTurns);
  const floor = 1e-9;
  const logs = epc.map((e) => Math.log10(Math.max(e, floor)));
  const [lo, hi] = extent(logs);
  const svg = new SvgBuilder(640, 400);
  const frame = axes(svg, extent(xs), [Math.floor(lo) - 0.2, Math.ceil(hi) + 0.2], {
    x: "compensation slope (2π×10⁻³ rad)",
    y: "log10 error per Clifford",
    title: "benchmarking error vs phase compensation",
  });
  const pts = xs.map((v, i) => [frame.x(v), frame.y(logs[i])] as [number, number]);
  svg.polyline(pts, 'stroke="#888888" stroke-width="1" stroke-dasharray="4,3"');
  for (const [px, py] of pts) {
    svg.circle(px, py, 3, 'fill="#94171e"');
  }
  const best = logs.indexOf(Math.min(...logs));
  svg.text(
    frame.x(xs[best]),
    frame.y(logs[best]) - 8,
    `min at ${fmt(xs[best])}`,
    'text-anchor="middle" font-size="10"',
  );
  return svg.toString();
}

export function renderFigure(kind: string, table: Table): string {
  switch (kind) {
    case "train-scan":
      return renderTrainScan(table);
    case "compensation-map":
      return renderCompensationMap(table);
    case "rb-error":
      return renderRbError(table);
    default:
      throw new CsvError(
        `unknown figure kind "${kind}" (expected ${FIGURE_KINDS.join(" | ")})`,
      );
  }
}
