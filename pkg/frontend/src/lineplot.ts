/**
 * RMSE and square-root CRB line plots against the sweep axis (SNR in dB or
 * the true direction in degrees). One solid RMSE curve and one dashed CRB
 * curve per selected estimator, on a logarithmic error axis by default.
 */

import type { SweepRow } from "./csv.js";
import { estimatorColors } from "./colors.js";
import { FigureSpec, FigureSpecError } from "./figure.js";
import { linearScale, logScale, tickLabel } from "./scales.js";
import { document, polyline, tag, text } from "./svg.js";

const WIDTH = 640;
const HEIGHT = 420;
const MARGIN = { left: 70, right: 20, top: 36, bottom: 52 };

export function renderLinePlot(rows: SweepRow[], spec: FigureSpec): string {
  const param = spec.param ?? "theta";
  const selected = rows.filter((row) => row.param === param);
  if (selected.length === 0) {
    const params = [...new Set(rows.map((r) => r.param))].join(", ");
    throw new FigureSpecError(`no rows for param "${param}" (file has: ${params})`);
  }
  const available = [...new Set(selected.map((row) => row.estimator))];
  const wanted = spec.estimators ?? available;
  if (wanted.length === 0) {
    throw new FigureSpecError("estimator selection must not be empty");
  }
  for (const id of wanted) {
    if (!available.includes(id)) {
      throw new FigureSpecError(
        `estimator "${id}" not present in the CSV (has: ${available.join(", ")})`,
      );
    }
  }

  const axisValues = [...new Set(selected.map((row) => row.axisValue))].sort((a, b) => a - b);
  const values: number[] = [];
  for (const row of selected) {
    if (!wanted.includes(row.estimator)) continue;
    values.push(row.rmseDeg);
    if (spec.crbOverlay) values.push(row.crbDeg);
  }
  const positive = values.filter((v) => v > 0);
  const useLog = (spec.logY ?? true) && positive.length > 0;
  const yLo = useLog ? Math.min(...positive) / 1.5 : 0;
  const yHi = Math.max(...values) * (useLog ? 1.5 : 1.08);

  const x = linearScale(axisValues[0], axisValues[axisValues.length - 1], MARGIN.left, WIDTH - MARGIN.right);
  const y = useLog
    ? logScale(yLo, yHi, HEIGHT - MARGIN.bottom, MARGIN.top)
    : linearScale(yLo, yHi, HEIGHT - MARGIN.bottom, MARGIN.top);

  const parts: string[] = [];
  // axes and grid
  for (const tick of x.ticks()) {
    const px = x.map(tick);
    parts.push(polyline([[px, MARGIN.top], [px, HEIGHT - MARGIN.bottom]], { stroke: "#dddddd", "stroke-width": 1 }));
    parts.push(text(px, HEIGHT - MARGIN.bottom + 18, tickLabel(tick), { "text-anchor": "middle", "font-size": 12 }));
  }
  for (const tick of y.ticks()) {
    const py = y.map(tick);
    parts.push(polyline([[MARGIN.left, py], [WIDTH - MARGIN.right, py]], { stroke: "#dddddd", "stroke-width": 1 }));
    parts.push(text(MARGIN.left - 8, py + 4, tickLabel(tick), { "text-anchor": "end", "font-size": 12 }));
  }
  parts.push(
    polyline(
      [[MARGIN.left, MARGIN.top], [MARGIN.left, HEIGHT - MARGIN.bottom], [WIDTH - MARGIN.right, HEIGHT - MARGIN.bottom]],
      { stroke: "#000000", "stroke-width": 1.5 },
    ),
  );

  const colors = estimatorColors(wanted);
  const clampY = (value: number) => y.map(useLog ? Math.max(value, yLo) : value);
  for (const id of wanted) {
    const series = selected
      .filter((row) => row.estimator === id)
      .sort((a, b) => a.axisValue - b.axisValue);
    const color = colors.get(id)!;
    parts.push(
      polyline(series.map((row) => [x.map(row.axisValue), clampY(row.rmseDeg)]), {
        stroke: color, "stroke-width": 2, class: `rmse-${id}`,
      }),
    );
    if (spec.crbOverlay) {
      parts.push(
        polyline(series.map((row) => [x.map(row.axisValue), clampY(row.crbDeg)]), {
          stroke: color, "stroke-width": 1.5, "stroke-dasharray": "6 4", class: `crb-${id}`,
        }),
      );
    }
  }

  // legend
  let legendY = MARGIN.top + 6;
  for (const id of wanted) {
    const color = colors.get(id)!;
    const lx = WIDTH - MARGIN.right - 170;
    parts.push(polyline([[lx, legendY], [lx + 26, legendY]], { stroke: color, "stroke-width": 2 }));
    parts.push(text(lx + 32, legendY + 4, `${id} RMSE`, { "font-size": 12 }));
    legendY += 16;
    if (spec.crbOverlay) {
      parts.push(
        polyline([[lx, legendY], [lx + 26, legendY]], {
          stroke: color, "stroke-width": 1.5, "stroke-dasharray": "6 4",
        }),
      );
      parts.push(text(lx + 32, legendY + 4, `${id} √CRB`, { "font-size": 12 }));
      legendY += 16;
    }
  }

  const xName = spec.kind === "line-snr" ? "SNR (dB)" : "true direction (deg)";
  parts.push(text(WIDTH / 2, HEIGHT - 14, xName, { "text-anchor": "middle", "font-size": 13 }));
  parts.push(
    tag(
      "g",
      { transform: `translate(18 ${HEIGHT / 2}) rotate(-90)` },
      text(0, 0, `${param} error (deg)`, { "text-anchor": "middle", "font-size": 13 }),
    ),
  );
  parts.push(text(MARGIN.left, 20, `${param} RMSE vs ${xName}`, { "font-size": 14, "font-weight": "bold" }));
  return document(WIDTH, HEIGHT, parts.join("\n"));
}
