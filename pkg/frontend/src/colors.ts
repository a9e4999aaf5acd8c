/**
 * Fixed color assignments: known estimator ids always get the same color, so
 * figures stay comparable across runs; unknown ids draw from a fallback
 * palette in first-appearance order.
 */

const KNOWN_COLORS: Record<string, string> = {
  "nc-ml": "#1f77b4",
  "nc-rc": "#2ca02c",
  "c-ml": "#d62728",
  "p-ml": "#9467bd",
};

const FALLBACK = ["#ff7f0e", "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"];

export function estimatorColors(ids: string[]): Map<string, string> {
  const colors = new Map<string, string>();
  const used = new Set<string>();
  let next = 0;
  for (const id of ids) {
    if (colors.has(id)) continue;
    const known = Object.keys(KNOWN_COLORS).find((key) => id === key || id.startsWith(`${key}-`));
    let color = known ? KNOWN_COLORS[known] : undefined;
    if (color === undefined || used.has(color)) {
      while (used.has(FALLBACK[next % FALLBACK.length])) next++;
      color = FALLBACK[next % FALLBACK.length];
    }
    colors.set(id, color);
    used.add(color);
  }
  return colors;
}

function channel(value: number): string {
  const byte = Math.max(0, Math.min(255, Math.round(value)));
  return byte.toString(16).padStart(2, "0");
}

function mix(from: [number, number, number], to: [number, number, number], t: number): string {
  return (
    "#" +
    channel(from[0] + (to[0] - from[0]) * t) +
    channel(from[1] + (to[1] - from[1]) * t) +
    channel(from[2] + (to[2] - from[2]) * t)
  );
}

const BLUE: [number, number, number] = [33, 102, 172];
const WHITE: [number, number, number] = [247, 247, 247];
const RED: [number, number, number] = [178, 24, 43];
const DARK: [number, number, number] = [13, 8, 135];
const BRIGHT: [number, number, number] = [240, 249, 33];

/**
 * Diverging color for bound ratios, centered at ratio = 1: below-bound cells
 * shade blue, above-bound cells red, saturating at a factor of 4 either way.
 */
export function divergingRatioColor(ratio: number): string {
  if (!Number.isFinite(ratio) || ratio <= 0) return "#b2182b";
  const t = Math.max(-1, Math.min(1, Math.log2(ratio) / 2));
  return t < 0 ? mix(WHITE, BLUE, -t) : mix(WHITE, RED, t);
}

/** Sequential dark-to-bright ramp for magnitudes mapped to [0, 1]. */
export function sequentialColor(unit: number): string {
  const t = Math.max(0, Math.min(1, unit));
  return mix(DARK, BRIGHT, t);
}
