/** Chart data builders: time-window strips and the acceptance mini-chart. */

import type { PreviewPayload } from "./types";

export interface WindowRow {
  id: number;
  readyFrac: number;
  dueFrac: number;
  serviceFrac: number;
}

/** Customer windows normalized by the planning horizon, for a strip chart. */
export function windowRows(payload: PreviewPayload): WindowRow[] {
  const horizon = payload.horizon;
  const rows: WindowRow[] = [];
  for (const node of payload.nodes) {
    if (node.kind !== "c") continue;
    rows.push({
      id: node.id,
      readyFrac: (node.ready ?? 0) / horizon,
      dueFrac: (node.due ?? horizon) / horizon,
      serviceFrac: (node.service ?? 0) / horizon,
    });
  }
  return rows;
}

export interface GammaPoint {
  n: number;
  gamma: number;
}

/** Bench job result -> sorted acceptance-rate points for the mini-chart. */
export function gammaPoints(curve: Record<string, number>): GammaPoint[] {
  return Object.entries(curve)
    .map(([n, gamma]) => ({ n: Number(n), gamma }))
    .filter((p) => Number.isFinite(p.n) && Number.isFinite(p.gamma))
    .sort((a, b) => a.n - b.n);
}

/** Bar geometry for an inline SVG, viewBox 0..width / 0..height. */
export function gammaBars(
  points: GammaPoint[],
  width = 220,
  height = 80,
): { x: number; y: number; w: number; h: number; label: string }[] {
  if (points.length === 0) return [];
  const gap = 6;
  const barW = (width - gap * (points.length + 1)) / points.length;
  return points.map((p, i) => {
    const h = Math.max(1, p.gamma * (height - 16));
    return {
      x: gap + i * (barW + gap),
      y: height - h,
      w: barW,
      h,
      label: `n=${p.n}: ${(p.gamma * 100).toFixed(1)}%`,
    };
  });
}
