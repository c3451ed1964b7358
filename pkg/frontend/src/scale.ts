/** Axis scales and tick generation for the SVG plots. */

export interface Scale {
  (value: number): number;
  ticks: number[];
  domain: [number, number];
}

/** Round-numbered ticks covering [lo, hi] with roughly `count` steps. */
export function niceTicks(lo: number, hi: number, count = 5): number[] {
  if (!(hi > lo)) {
    return [lo];
  }
  const rawStep = (hi - lo) / count;
  const magnitude = Math.pow(10, Math.floor(Math.log10(rawStep)));
  const residual = rawStep / magnitude;
  const factor =
    residual >= Math.sqrt(50) ? 10 : residual >= Math.sqrt(10) ? 5 : residual >= Math.SQRT2 ? 2 : 1;
  const step = factor * magnitude;
  const start = Math.ceil(lo / step) * step;
  const ticks: number[] = [];
  for (let v = start; v <= hi + step * 1e-9; v += step) {
    ticks.push(Number(v.toPrecision(12)));
  }
  return ticks;
}

export function linearScale(
  domain: [number, number],
  range: [number, number],
): Scale {
  const [d0, d1] = domain;
  const [r0, r1] = range;
  const span = d1 - d0 || 1;
  const fn = ((value: number) => r0 + ((value - d0) / span) * (r1 - r0)) as Scale;
  fn.ticks = niceTicks(d0, d1);
  fn.domain = domain;
  return fn;
}

/** Decade ticks; the domain is padded out to full powers of ten. */
export function logScale(
  domain: [number, number],
  range: [number, number],
): Scale {
  const lo = Math.pow(10, Math.floor(Math.log10(domain[0])));
  const hi = Math.pow(10, Math.ceil(Math.log10(domain[1])));
  const [r0, r1] = range;
  const span = Math.log10(hi) - Math.log10(lo) || 1;
  const fn = ((value: number) =>
    r0 + ((Math.log10(value) - Math.log10(lo)) / span) * (r1 - r0)) as Scale;
  const ticks: number[] = [];
  for (let t = Math.log10(lo); t <= Math.log10(hi) + 1e-9; t += 1) {
    ticks.push(Number(Math.pow(10, t).toPrecision(12)));
  }
  fn.ticks = ticks;
  fn.domain = [lo, hi];
  return fn;
}
