/**
 * Minimal deterministic SVG generation: plain string assembly with a fixed
 * number format, so identical inputs always produce identical bytes.
 */

export function fmt(value: number): string {
  if (!Number.isFinite(value)) {
    throw new Error(`cannot format non-finite coordinate ${value}`);
  }
  if (value === 0) return "0";
  const text = value.toPrecision(6);
  // trim trailing zeros without touching exponent notation
  if (text.includes("e")) return text;
  return text.replace(/\.?0+$/, "");
}

export type Attrs = Record<string, string | number>;

export function tag(name: string, attrs: Attrs, body = ""): string {
  const rendered = Object.entries(attrs)
    .map(([key, raw]) => `${key}="${typeof raw === "number" ? fmt(raw) : raw}"`)
    .join(" ");
  return body === "" ? `<${name} ${rendered}/>` : `<${name} ${rendered}>${body}</${name}>`;
}

export function text(x: number, y: number, body: string, attrs: Attrs = {}): string {
  return tag("text", { x, y, "font-family": "sans-serif", ...attrs }, escapeText(body));
}

export function escapeText(body: string): string {
  return body.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}

export function polyline(points: Array<[number, number]>, attrs: Attrs): string {
  const path = points.map(([x, y]) => `${fmt(x)},${fmt(y)}`).join(" ");
  return tag("polyline", { points: path, fill: "none", ...attrs });
}

export function document(width: number, height: number, body: string): string {
  return (
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" ` +
    `viewBox="0 0 ${width} ${height}">\n` +
    `<rect x="0" y="0" width="${width}" height="${height}" fill="#ffffff"/>\n` +
    body +
    "\n</svg>\n"
  );
}
