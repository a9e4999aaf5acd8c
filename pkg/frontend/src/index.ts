/** Render harness CSV files into deterministic SVG figures. */

import { readFileSync, writeFileSync } from "node:fs";

import { parseLikemapCsv, parseSurfaceCsv, parseSweepCsv } from "./csv.js";
import { FigureSpec, validateSpec } from "./figure.js";
import { renderLinePlot } from "./lineplot.js";
import { renderLikelihoodMap, renderPolarSurface } from "./polarplot.js";

export { SchemaError, parseLikemapCsv, parseSurfaceCsv, parseSweepCsv } from "./csv.js";
export { FigureSpec, FigureSpecError, validateSpec } from "./figure.js";
export { renderLinePlot } from "./lineplot.js";
export { renderLikelihoodMap, renderPolarSurface } from "./polarplot.js";

/** Produce the SVG text for a validated figure spec. */
export function renderToString(spec: FigureSpec): string {
  const csvText = readFileSync(spec.csv, "utf-8");
  switch (spec.kind) {
    case "line-snr":
    case "line-theta":
      return renderLinePlot(parseSweepCsv(csvText), spec);
    case "polar-surface":
      return renderPolarSurface(parseSurfaceCsv(csvText), spec);
    case "likelihood-map":
      return renderLikelihoodMap(parseLikemapCsv(csvText), spec);
  }
}

/** Validate a raw spec, render it, and write the SVG file. */
export function render(raw: unknown): string {
  const spec = validateSpec(raw);
  const svg = renderToString(spec);
  writeFileSync(spec.out, svg);
  return spec.out;
}
