/**
 * Strict parsers for the versioned CSV schemas emitted by the simulation
 * harness. The plot layer never recomputes statistics; it only displays the
 * columns parsed here.
 */

export const SUPPORTED_SCHEMA_VERSION = "1";

export class SchemaError extends Error {}

export interface SweepRow {
  axis: string;
  axisValue: number;
  estimator: string;
  param: string;
  rmseDeg: number;
  crbDeg: number;
  ratio: number;
  trials: number;
  failures: number;
  ambiguous: number;
}

export interface SurfaceRow {
  estimator: string;
  thetaDeg: number;
  phiDeg: number;
  param: string;
  metric: "rmse" | "crb" | "ratio";
  value: number;
}

export interface LikemapRow {
  objective: "noncoherent" | "coherent";
  thetaDeg: number;
  phiDeg: number;
  value: number;
}

const SWEEP_COLUMNS = [
  "schema_version", "config_hash", "axis", "axis_value", "estimator", "param",
  "rmse_deg", "crb_deg", "ratio", "trials", "failures", "ambiguous",
];
const SURFACE_COLUMNS = [
  "schema_version", "config_hash", "estimator", "theta_deg", "phi_deg",
  "param", "metric", "value",
];
const LIKEMAP_COLUMNS = [
  "schema_version", "config_hash", "objective", "theta_deg", "phi_deg", "value",
];

function splitRows(text: string, columns: string[], label: string): string[][] {
  const lines = text.split(/\r?\n/).filter((line) => line.length > 0);
  if (lines.length === 0) {
    throw new SchemaError(`${label}: empty file`);
  }
  const header = lines[0].split(",");
  if (header.length !== columns.length || columns.some((c, i) => header[i] !== c)) {
    throw new SchemaError(
      `${label}: header mismatch; expected "${columns.join(",")}", got "${lines[0]}"`,
    );
  }
  const rows: string[][] = [];
  for (let i = 1; i < lines.length; i++) {
    const cells = lines[i].split(",");
    if (cells.length !== columns.length) {
      throw new SchemaError(`${label}: row ${i + 1} has ${cells.length} cells`);
    }
    if (cells[0] !== SUPPORTED_SCHEMA_VERSION) {
      throw new SchemaError(`${label}: unsupported schema version ${cells[0]} in row ${i + 1}`);
    }
    rows.push(cells);
  }
  return rows;
}

function toNumber(cell: string, label: string): number {
  const value = Number(cell);
  if (!Number.isFinite(value)) {
    throw new SchemaError(`${label}: non-numeric value "${cell}"`);
  }
  return value;
}

export function parseSweepCsv(text: string): SweepRow[] {
  return splitRows(text, SWEEP_COLUMNS, "sweep csv").map((cells) => ({
    axis: cells[2],
    axisValue: toNumber(cells[3], "axis_value"),
    estimator: cells[4],
    param: cells[5],
    rmseDeg: toNumber(cells[6], "rmse_deg"),
    crbDeg: toNumber(cells[7], "crb_deg"),
    ratio: toNumber(cells[8], "ratio"),
    trials: toNumber(cells[9], "trials"),
    failures: toNumber(cells[10], "failures"),
    ambiguous: toNumber(cells[11], "ambiguous"),
  }));
}

export function parseSurfaceCsv(text: string): SurfaceRow[] {
  return splitRows(text, SURFACE_COLUMNS, "surface csv").map((cells) => {
    const metric = cells[6];
    if (metric !== "rmse" && metric !== "crb" && metric !== "ratio") {
      throw new SchemaError(`surface csv: unknown metric "${metric}"`);
    }
    return {
      estimator: cells[2],
      thetaDeg: toNumber(cells[3], "theta_deg"),
      phiDeg: toNumber(cells[4], "phi_deg"),
      param: cells[5],
      metric,
      value: toNumber(cells[7], "value"),
    };
  });
}

export function parseLikemapCsv(text: string): LikemapRow[] {
  return splitRows(text, LIKEMAP_COLUMNS, "likelihood-map csv").map((cells) => {
    const objective = cells[2];
    if (objective !== "noncoherent" && objective !== "coherent") {
      throw new SchemaError(`likelihood-map csv: unknown objective "${objective}"`);
    }
    return {
      objective,
      thetaDeg: toNumber(cells[3], "theta_deg"),
      phiDeg: toNumber(cells[4], "phi_deg"),
      value: toNumber(cells[5], "value"),
    };
  });
}
