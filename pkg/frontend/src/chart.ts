// SVG chart geometry. Scale transforms here are pixel layout; the numbers
// annotated on charts are raw service fields (see views.ts).

export interface Scale {
  (value: number): number;
}

export function linearScale(d0: number, d1: number, r0: number, r1: number): Scale {
  const span = d1 - d0 || 1;
  return (value: number) => r0 + ((value - d0) / span) * (r1 - r0);
}

export function log10Scale(d0: number, d1: number, r0: number, r1: number): Scale {
  const inner = linearScale(Math.log10(d0), Math.log10(d1), r0, r1);
  return (value: number) => inner(Math.log10(value));
}

export function polyline(points: [number, number][], x: Scale, y: Scale): string {
  return points
    .map(([px, py], i) => `${i === 0 ? "M" : "L"}${x(px).toFixed(1)},${y(py).toFixed(1)}`)
    .join(" ");
}

/** Evenly spaced positions on a circle, for the ring/mesh topology map. */
export function circleLayout(ids: string[], cx: number, cy: number, radius: number): Map<string, [number, number]> {
  const out = new Map<string, [number, number]>();
  ids.forEach((id, i) => {
    const angle = (2 * Math.PI * i) / ids.length - Math.PI / 2;
    out.set(id, [cx + radius * Math.cos(angle), cy + radius * Math.sin(angle)]);
  });
  return out;
}
