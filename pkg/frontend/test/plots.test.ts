import { mkdtempSync, readFileSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { describe, expect, it } from "vitest";

import { divergingRatioColor, estimatorColors } from "../src/colors.js";
import { SchemaError, parseSweepCsv } from "../src/csv.js";
import { FigureSpecError, validateSpec } from "../src/figure.js";
import { renderToString } from "../src/index.js";
import { main as cliMain } from "../src/cli.js";

const FIXTURES = join(__dirname, "fixtures");
const GOLDEN = join(__dirname, "golden");

function renderFixture(raw: Record<string, unknown>): string {
  return renderToString(validateSpec({ out: "unused.svg", ...raw }));
}

describe("golden images", () => {
  const cases: Array<[string, Record<string, unknown>]> = [
    ["sweep-line.svg", { kind: "line-snr", csv: join(FIXTURES, "sweep.csv") }],
    ["theta-line.svg", { kind: "line-theta", csv: join(FIXTURES, "theta.csv") }],
    [
      "surface-ratio.svg",
      { kind: "polar-surface", csv: join(FIXTURES, "surface.csv"), metric: "ratio" },
    ],
    ["likemap.svg", { kind: "likelihood-map", csv: join(FIXTURES, "likemap.csv") }],
  ];
  for (const [golden, raw] of cases) {
    it(`matches ${golden}`, () => {
      const svg = renderFixture(raw);
      expect(svg).toBe(readFileSync(join(GOLDEN, golden), "utf-8"));
    });
  }

  it("renders identical bytes on repeat", () => {
    const raw = { kind: "line-snr", csv: join(FIXTURES, "sweep.csv") };
    expect(renderFixture(raw)).toBe(renderFixture(raw));
  });
});

describe("line plots", () => {
  it("draws one RMSE and one CRB curve per estimator", () => {
    const svg = renderFixture({ kind: "line-snr", csv: join(FIXTURES, "sweep.csv") });
    for (const id of ["c-ml-wm", "c-ml-ait"]) {
      expect(svg).toContain(`class="rmse-${id}"`);
      expect(svg).toContain(`class="crb-${id}"`);
    }
  });

  it("can drop the bound overlay", () => {
    const svg = renderFixture({
      kind: "line-snr",
      csv: join(FIXTURES, "sweep.csv"),
      crbOverlay: false,
    });
    expect(svg).toContain('class="rmse-c-ml-wm"');
    expect(svg).not.toContain('class="crb-c-ml-wm"');
  });

  it("honors the estimator selection", () => {
    const svg = renderFixture({
      kind: "line-snr",
      csv: join(FIXTURES, "sweep.csv"),
      estimators: ["c-ml-wm"],
    });
    expect(svg).toContain('class="rmse-c-ml-wm"');
    expect(svg).not.toContain('class="rmse-c-ml-ait"');
  });

  it("rejects an empty series selection", () => {
    expect(() =>
      validateSpec({
        kind: "line-snr",
        csv: join(FIXTURES, "sweep.csv"),
        out: "x.svg",
        estimators: [],
      }),
    ).toThrow(FigureSpecError);
  });

  it("rejects series missing from the file", () => {
    expect(() =>
      renderFixture({
        kind: "line-snr",
        csv: join(FIXTURES, "sweep.csv"),
        estimators: ["music"],
      }),
    ).toThrow(/not present/);
  });
});

describe("csv schema", () => {
  it("rejects a tampered header", () => {
    const text = readFileSync(join(FIXTURES, "sweep.csv"), "utf-8");
    expect(() => parseSweepCsv(text.replace("rmse_deg", "rmse"))).toThrow(SchemaError);
  });

  it("rejects future schema versions", () => {
    const text = readFileSync(join(FIXTURES, "sweep.csv"), "utf-8");
    const lines = text.split("\n");
    lines[1] = lines[1].replace(/^1,/, "9,");
    expect(() => parseSweepCsv(lines.join("\n"))).toThrow(/schema version/);
  });

  it("parses every fixture row", () => {
    const rows = parseSweepCsv(readFileSync(join(FIXTURES, "sweep.csv"), "utf-8"));
    expect(rows.length).toBe(14); // 7 SNR points x 2 estimators
    expect(rows.every((row) => row.rmseDeg > 0 && row.crbDeg > 0)).toBe(true);
  });
});

describe("polar surface", () => {
  it("uses a diverging scale centered at one", () => {
    expect(divergingRatioColor(1)).toBe("#f7f7f7");
    const above = divergingRatioColor(4);
    const below = divergingRatioColor(0.25);
    expect(Number.parseInt(above.slice(1, 3), 16)).toBeGreaterThan(
      Number.parseInt(above.slice(5, 7), 16),
    ); // red-dominated
    expect(Number.parseInt(below.slice(5, 7), 16)).toBeGreaterThan(
      Number.parseInt(below.slice(1, 3), 16),
    ); // blue-dominated
  });

  it("draws one annular sector per grid cell", () => {
    const svg = renderFixture({
      kind: "polar-surface",
      csv: join(FIXTURES, "surface.csv"),
      metric: "ratio",
    });
    const sectors = svg.match(/<path /g) ?? [];
    expect(sectors.length).toBe(5 * 12); // theta cells x phi cells
  });

  it("refuses multi-series selections", () => {
    expect(() =>
      renderFixture({
        kind: "polar-surface",
        csv: join(FIXTURES, "surface.csv"),
        estimators: ["a", "b"],
      }),
    ).toThrow(/exactly one/);
  });
});

describe("estimator colors", () => {
  it("keeps well-known ids stable and never reuses a color", () => {
    const colors = estimatorColors(["nc-ml", "c-ml", "c-ml-ait", "custom"]);
    expect(colors.get("nc-ml")).toBe("#1f77b4");
    expect(colors.get("c-ml")).toBe("#d62728");
    expect(new Set(colors.values()).size).toBe(4);
  });
});

describe("cli", () => {
  it("renders from a spec file", () => {
    const dir = mkdtempSync(join(tmpdir(), "plots-"));
    const out = join(dir, "figure.svg");
    const specPath = join(dir, "spec.json");
    writeFileSync(
      specPath,
      JSON.stringify({ kind: "line-snr", csv: join(FIXTURES, "sweep.csv"), out }),
    );
    expect(cliMain(["--spec", specPath])).toBe(0);
    expect(readFileSync(out, "utf-8")).toContain("<svg");
  });

  it("renders from flags", () => {
    const dir = mkdtempSync(join(tmpdir(), "plots-"));
    const out = join(dir, "figure.svg");
    const code = cliMain([
      "--kind", "polar-surface",
      "--csv", join(FIXTURES, "surface.csv"),
      "--out", out,
      "--metric", "crb",
    ]);
    expect(code).toBe(0);
    expect(readFileSync(out, "utf-8")).toContain("<svg");
  });

  it("fails cleanly on bad specs", () => {
    expect(cliMain(["--kind", "nope", "--csv", "x", "--out", "y"])).toBe(2);
  });
});
