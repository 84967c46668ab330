// Display formatting only. The console does no QoT math: every number
// shown comes verbatim from a service response field.

export function db(value: number | null | undefined, digits = 2): string {
  return value === null || value === undefined ? "-" : `${value.toFixed(digits)} dB`;
}

export function dbm(value: number | null | undefined, digits = 1): string {
  return value === null || value === undefined ? "-" : `${value.toFixed(digits)} dBm`;
}

export function sci(value: number | null | undefined): string {
  return value === null || value === undefined ? "-" : value.toExponential(2);
}

export function timestamp(value: number): string {
  return new Date(value * 1000).toISOString().replace("T", " ").slice(0, 19);
}

/** Uniform index decimation so charts never render more than `max` points. */
export function decimate<T>(points: T[], max = 2000): T[] {
  if (points.length <= max) {
    return points;
  }
  const stride = (points.length - 1) / (max - 1);
  const out: T[] = [];
  for (let i = 0; i < max; i += 1) {
    out.push(points[Math.round(i * stride)]);
  }
  return out;
}
