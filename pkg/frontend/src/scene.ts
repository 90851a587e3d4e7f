/** Topology scene: payload in, drawable shape list out.
 *
 * Building and drawing are split so the mapping from payload to shapes
 * stays testable without a canvas. The depot renders as a square,
 * customers as circles, charging stations as triangles; customers named
 * in the screening report render highlighted.
 */

import type { PreviewPayload } from "./types";

export type ShapeKind = "square" | "circle" | "triangle";

export interface Shape {
  kind: ShapeKind;
  id: number;
  x: number;
  y: number;
  highlighted: boolean;
}

export interface Scene {
  shapes: Shape[];
  counts: { depots: number; customers: number; stations: number };
}

export class SceneError extends Error {}

const KIND_TO_SHAPE: Record<string, ShapeKind> = {
  d: "square",
  c: "circle",
  f: "triangle",
};

export function buildScene(payload: PreviewPayload): Scene {
  if (!payload || !Array.isArray(payload.nodes)) {
    throw new SceneError("payload has no node list");
  }
  const violated = new Set<number>(
    (payload.metadata?.screening?.violations ?? []).map((v) => v.customer_id),
  );
  const shapes: Shape[] = [];
  const counts = { depots: 0, customers: 0, stations: 0 };
  for (const node of payload.nodes) {
    const kind = KIND_TO_SHAPE[node.kind];
    if (kind === undefined) {
      throw new SceneError(`unknown node kind ${JSON.stringify(node.kind)}`);
    }
    if (!Number.isFinite(node.x) || !Number.isFinite(node.y)) {
      throw new SceneError(`node ${node.id} has non-finite coordinates`);
    }
    if (node.x < 0 || node.x > 1 || node.y < 0 || node.y > 1) {
      throw new SceneError(`node ${node.id} lies outside the unit square`);
    }
    if (kind === "square") counts.depots += 1;
    else if (kind === "circle") counts.customers += 1;
    else counts.stations += 1;
    shapes.push({
      kind,
      id: node.id,
      x: node.x,
      y: node.y,
      highlighted: kind === "circle" && violated.has(node.id),
    });
  }
  return { shapes, counts };
}

const COLORS = {
  square: "#ffb454",
  circle: "#7fd4ff",
  triangle: "#b8e986",
  highlight: "#ff5370",
};

/** Paint a scene; returns false when no 2D context exists (tests). */
export function drawScene(canvas: HTMLCanvasElement, scene: Scene): boolean {
  const ctx = canvas.getContext("2d");
  if (!ctx) return false;
  const w = canvas.width;
  const h = canvas.height;
  const pad = 14;
  // The instance lives on the unit square; y flips so the origin sits
  // bottom-left like a plot, not top-left like a canvas.
  const px = (x: number) => pad + x * (w - 2 * pad);
  const py = (y: number) => h - pad - y * (h - 2 * pad);

  ctx.clearRect(0, 0, w, h);
  ctx.strokeStyle = "#2b3245";
  ctx.strokeRect(pad, pad, w - 2 * pad, h - 2 * pad);

  for (const shape of scene.shapes) {
    const cx = px(shape.x);
    const cy = py(shape.y);
    const r = shape.kind === "square" ? 7 : 5.5;
    ctx.beginPath();
    if (shape.kind === "square") {
      ctx.rect(cx - r, cy - r, 2 * r, 2 * r);
    } else if (shape.kind === "circle") {
      ctx.arc(cx, cy, r, 0, Math.PI * 2);
    } else {
      ctx.moveTo(cx, cy - r);
      ctx.lineTo(cx - r, cy + r);
      ctx.lineTo(cx + r, cy + r);
      ctx.closePath();
    }
    ctx.fillStyle = shape.highlighted ? COLORS.highlight : COLORS[shape.kind];
    ctx.fill();
    if (shape.highlighted) {
      ctx.lineWidth = 2;
      ctx.strokeStyle = COLORS.highlight;
      ctx.beginPath();
      ctx.arc(cx, cy, r + 4, 0, Math.PI * 2);
      ctx.stroke();
      ctx.lineWidth = 1;
    }
  }
  return true;
}
