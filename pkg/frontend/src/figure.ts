/** Figure specifications: what to read, which series to draw, where to write. */

export type FigureKind = "line-snr" | "line-theta" | "polar-surface" | "likelihood-map";

export class FigureSpecError extends Error {}

export interface FigureSpec {
  kind: FigureKind;
  /** Input CSV path (sweep, surface or likelihood-map schema per kind). */
  csv: string;
  /** Output SVG path. */
  out: string;
  /** Estimator ids to draw; defaults to every id present in the file. */
  estimators?: string[];
  /** Parameter to display (theta, phi, gamma, beta, theta_0, ...). */
  param?: string;
  /** Surface metric; defaults to the bound ratio. */
  metric?: "rmse" | "crb" | "ratio";
  /** Overlay square-root CRB curves on line plots (default true). */
  crbOverlay?: boolean;
  /** Logarithmic y axis on line plots (default true). */
  logY?: boolean;
}

const KINDS: FigureKind[] = ["line-snr", "line-theta", "polar-surface", "likelihood-map"];

export function validateSpec(raw: unknown): FigureSpec {
  if (typeof raw !== "object" || raw === null) {
    throw new FigureSpecError("figure spec must be an object");
  }
  const spec = raw as Record<string, unknown>;
  const kind = spec.kind;
  if (typeof kind !== "string" || !KINDS.includes(kind as FigureKind)) {
    throw new FigureSpecError(`kind must be one of ${KINDS.join(", ")}`);
  }
  if (typeof spec.csv !== "string" || spec.csv.length === 0) {
    throw new FigureSpecError("csv path is required");
  }
  if (typeof spec.out !== "string" || spec.out.length === 0) {
    throw new FigureSpecError("out path is required");
  }
  if (spec.estimators !== undefined) {
    if (!Array.isArray(spec.estimators) || spec.estimators.some((e) => typeof e !== "string")) {
      throw new FigureSpecError("estimators must be an array of ids");
    }
    if (spec.estimators.length === 0) {
      throw new FigureSpecError("estimator selection must not be empty");
    }
  }
  if (spec.metric !== undefined && !["rmse", "crb", "ratio"].includes(spec.metric as string)) {
    throw new FigureSpecError(`unknown metric ${String(spec.metric)}`);
  }
  return {
    kind: kind as FigureKind,
    csv: spec.csv,
    out: spec.out,
    estimators: spec.estimators as string[] | undefined,
    param: (spec.param as string | undefined) ?? "theta",
    metric: (spec.metric as "rmse" | "crb" | "ratio" | undefined) ?? "ratio",
    crbOverlay: (spec.crbOverlay as boolean | undefined) ?? true,
    logY: (spec.logY as boolean | undefined) ?? true,
  };
}
