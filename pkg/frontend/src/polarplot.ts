/**
 * Polar heatmaps over the direction grid: radius is the inclination theta,
 * angle is the azimuth phi. Used both for surface metrics (RMSE, bound,
 * bound ratio with a diverging scale centered at 1) and for normalized
 * likelihood maps (two side-by-side panels).
 */

import type { LikemapRow, SurfaceRow } from "./csv.js";
import { divergingRatioColor, sequentialColor } from "./colors.js";
import { FigureSpec, FigureSpecError } from "./figure.js";
import { document, fmt, tag, text } from "./svg.js";

const PANEL = 340;
const LEGEND_H = 58;

function sectorPath(
  cx: number, cy: number, r0: number, r1: number, a0: number, a1: number,
): string {
  // annular sector between radii r0..r1 and angles a0..a1 (radians)
  const points = [
    [cx + r0 * Math.cos(a0), cy - r0 * Math.sin(a0)],
    [cx + r1 * Math.cos(a0), cy - r1 * Math.sin(a0)],
  ];
  const large = a1 - a0 > Math.PI ? 1 : 0;
  return (
    `M ${fmt(points[0][0])} ${fmt(points[0][1])} ` +
    `L ${fmt(points[1][0])} ${fmt(points[1][1])} ` +
    `A ${fmt(r1)} ${fmt(r1)} 0 ${large} 0 ${fmt(cx + r1 * Math.cos(a1))} ${fmt(cy - r1 * Math.sin(a1))} ` +
    `L ${fmt(cx + r0 * Math.cos(a1))} ${fmt(cy - r0 * Math.sin(a1))} ` +
    `A ${fmt(r0)} ${fmt(r0)} 0 ${large} 1 ${fmt(points[0][0])} ${fmt(points[0][1])} Z`
  );
}

interface Cell {
  thetaDeg: number;
  phiDeg: number;
  value: number;
}

function panel(
  cells: Cell[],
  cx: number,
  cy: number,
  radius: number,
  color: (value: number) => string,
  title: string,
): string {
  const thetas = [...new Set(cells.map((c) => c.thetaDeg))].sort((a, b) => a - b);
  const phis = [...new Set(cells.map((c) => c.phiDeg))].sort((a, b) => a - b);
  const thetaStep = thetas.length > 1 ? thetas[1] - thetas[0] : 10;
  const phiStep = phis.length > 1 ? phis[1] - phis[0] : 30;
  const maxTheta = thetas[thetas.length - 1] + thetaStep / 2;
  const scale = radius / maxTheta;

  const parts: string[] = [];
  for (const cell of cells) {
    const r0 = Math.max(cell.thetaDeg - thetaStep / 2, 0) * scale;
    const r1 = (cell.thetaDeg + thetaStep / 2) * scale;
    const a0 = ((cell.phiDeg - phiStep / 2) * Math.PI) / 180;
    const a1 = ((cell.phiDeg + phiStep / 2) * Math.PI) / 180;
    parts.push(
      tag("path", { d: sectorPath(cx, cy, r0, r1, a0, a1), fill: color(cell.value), stroke: "none" }),
    );
  }
  // rings every 30 degrees of inclination
  for (let ring = 30; ring <= maxTheta + 1e-9; ring += 30) {
    parts.push(
      tag("circle", { cx, cy, r: ring * scale, fill: "none", stroke: "#666666", "stroke-width": 0.8, "stroke-dasharray": "3 3" }),
    );
    parts.push(text(cx + 4, cy - ring * scale + 12, `${ring}°`, { "font-size": 10, fill: "#333333" }));
  }
  parts.push(tag("circle", { cx, cy, r: radius, fill: "none", stroke: "#000000", "stroke-width": 1 }));
  parts.push(text(cx + radius + 4, cy + 4, "φ=0°", { "font-size": 10 }));
  parts.push(text(cx, cy - radius - 8, title, { "text-anchor": "middle", "font-size": 13, "font-weight": "bold" }));
  return parts.join("\n");
}

function colorbar(
  x: number, y: number, width: number,
  color: (t: number) => string, labels: [string, string, string],
): string {
  const parts: string[] = [];
  const steps = 48;
  for (let i = 0; i < steps; i++) {
    parts.push(
      tag("rect", {
        x: x + (i * width) / steps, y, width: width / steps + 0.5, height: 12,
        fill: color(i / (steps - 1)), stroke: "none",
      }),
    );
  }
  parts.push(tag("rect", { x, y, width, height: 12, fill: "none", stroke: "#000000", "stroke-width": 0.8 }));
  parts.push(text(x, y + 26, labels[0], { "font-size": 11 }));
  parts.push(text(x + width / 2, y + 26, labels[1], { "text-anchor": "middle", "font-size": 11 }));
  parts.push(text(x + width, y + 26, labels[2], { "text-anchor": "end", "font-size": 11 }));
  return parts.join("\n");
}

export function renderPolarSurface(rows: SurfaceRow[], spec: FigureSpec): string {
  const metric = spec.metric ?? "ratio";
  const param = spec.param ?? "theta";
  const available = [...new Set(rows.map((row) => row.estimator))];
  const wanted = spec.estimators ?? available.slice(0, 1);
  if (wanted.length !== 1) {
    throw new FigureSpecError("polar surfaces draw exactly one estimator series");
  }
  if (!available.includes(wanted[0])) {
    throw new FigureSpecError(
      `estimator "${wanted[0]}" not present in the CSV (has: ${available.join(", ")})`,
    );
  }
  const cells = rows
    .filter((row) => row.estimator === wanted[0] && row.param === param && row.metric === metric)
    .map((row) => ({ thetaDeg: row.thetaDeg, phiDeg: row.phiDeg, value: row.value }));
  if (cells.length === 0) {
    throw new FigureSpecError(`no ${metric} cells for param "${param}"`);
  }

  const width = PANEL + 40;
  const height = PANEL + LEGEND_H + 40;
  const cx = width / 2;
  const cy = PANEL / 2 + 30;
  const radius = PANEL / 2 - 12;

  let fill: (value: number) => string;
  let legend: string;
  if (metric === "ratio") {
    fill = divergingRatioColor;
    legend = colorbar(
      40, PANEL + 44, width - 80,
      (t) => divergingRatioColor(Math.pow(2, (t * 2 - 1) * 2)),
      ["×0.25", "ratio 1", "×4"],
    );
  } else {
    const positive = cells.map((c) => c.value).filter((v) => v > 0);
    const lo = positive.length ? Math.min(...positive) : 1e-6;
    const hi = Math.max(...cells.map((c) => c.value), lo * 10);
    const spread = Math.log10(hi) - Math.log10(lo) || 1;
    fill = (value) =>
      sequentialColor((Math.log10(Math.max(value, lo)) - Math.log10(lo)) / spread);
    legend = colorbar(
      40, PANEL + 44, width - 80, sequentialColor,
      [`${lo.toPrecision(2)}°`, `${metric} (deg, log)`, `${hi.toPrecision(2)}°`],
    );
  }
  const body =
    panel(cells, cx, cy, radius, fill, `${wanted[0]}: ${param} ${metric}`) + "\n" + legend;
  return document(width, height, body);
}

export function renderLikelihoodMap(rows: LikemapRow[], spec: FigureSpec): string {
  const objectives: Array<"coherent" | "noncoherent"> = ["coherent", "noncoherent"];
  const width = 2 * PANEL + 60;
  const height = PANEL + LEGEND_H + 40;
  const parts: string[] = [];
  objectives.forEach((objective, index) => {
    const cells = rows
      .filter((row) => row.objective === objective)
      .map((row) => ({ thetaDeg: row.thetaDeg, phiDeg: row.phiDeg, value: row.value }));
    if (cells.length === 0) {
      throw new FigureSpecError(`no ${objective} cells in the likelihood-map CSV`);
    }
    const cx = 20 + PANEL / 2 + index * (PANEL + 20);
    const cy = PANEL / 2 + 30;
    parts.push(
      panel(cells, cx, cy, PANEL / 2 - 12, (value) => sequentialColor(value + 1), objective),
    );
  });
  parts.push(
    colorbar(60, PANEL + 44, width - 120, sequentialColor, ["-1", "normalized log-likelihood", "0"]),
  );
  return document(width, height, parts.join("\n"));
}
