/** Linear and logarithmic axis scales with simple tick generation. */

export interface Scale {
  map(value: number): number;
  ticks(): number[];
}

export function linearScale(lo: number, hi: number, outLo: number, outHi: number): Scale {
  const span = hi - lo || 1;
  return {
    map: (value) => outLo + ((value - lo) / span) * (outHi - outLo),
    ticks: () => linearTicks(lo, hi),
  };
}

export function logScale(lo: number, hi: number, outLo: number, outHi: number): Scale {
  if (lo <= 0 || hi <= 0) {
    throw new Error("log scales need positive bounds");
  }
  const logLo = Math.log10(lo);
  const span = Math.log10(hi) - logLo || 1;
  return {
    map: (value) => outLo + ((Math.log10(value) - logLo) / span) * (outHi - outLo),
    ticks: () => decadeTicks(lo, hi),
  };
}

export function linearTicks(lo: number, hi: number, target = 6): number[] {
  const span = hi - lo;
  if (span <= 0) return [lo];
  const rawStep = span / target;
  const power = Math.floor(Math.log10(rawStep));
  const base = Math.pow(10, power);
  let step = base;
  for (const mult of [1, 2, 5, 10]) {
    if (mult * base >= rawStep) {
      step = mult * base;
      break;
    }
  }
  const ticks: number[] = [];
  for (let v = Math.ceil(lo / step) * step; v <= hi + 1e-9 * span; v += step) {
    ticks.push(Math.abs(v) < step * 1e-9 ? 0 : v);
  }
  return ticks;
}

function decadeTicks(lo: number, hi: number): number[] {
  const ticks: number[] = [];
  const first = Math.ceil(Math.log10(lo) - 1e-12);
  const last = Math.floor(Math.log10(hi) + 1e-12);
  for (let p = first; p <= last; p++) {
    ticks.push(Math.pow(10, p));
  }
  if (ticks.length === 0) {
    ticks.push(lo, hi);
  }
  return ticks;
}

export function tickLabel(value: number): string {
  if (value === 0) return "0";
  const magnitude = Math.abs(value);
  if (magnitude >= 1e4 || magnitude < 1e-3) {
    return value.toExponential(0).replace("+", "");
  }
  return Number(value.toPrecision(4)).toString();
}
