/** Payload shapes as the HTTP service emits them. */

export type Family = "R" | "C" | "RC";
export type Regime = "wide" | "medium" | "tight";

export interface NodePayload {
  id: number;
  kind: string;
  x: number;
  y: number;
  demand?: number;
  ready?: number;
  due?: number;
  service?: number;
}

export interface ViolationPayload {
  condition: string;
  customer_id: number;
  measured: number;
  threshold: number;
}

export interface ScreeningPayload {
  passed: boolean;
  violations: ViolationPayload[];
}

export interface PreviewPayload {
  name: string;
  status: string;
  feasibility: string;
  seed: number;
  metadata: {
    screening: ScreeningPayload;
    [key: string]: unknown;
  };
  instance_text: string;
  nodes: NodePayload[];
  vehicle: {
    capacity: number;
    battery: number;
    consumption_rate: number;
    charge_rate: number;
    max_range: number;
  };
  horizon: number;
  station_default: number;
}

/** Draft of the generation knobs the form edits. Nulls mean server defaults. */
export interface ConfigDraft {
  customers: number;
  stations: number | null;
  family: Family;
  regime: Regime;
  phi: number | null;
  seed: number;
  sigma: number;
  rho: number;
  capacity: number;
  rate: number;
  charge_rate: number;
  horizon: number;
  randomized_window_starts: boolean;
}

export const DEFAULT_DRAFT: ConfigDraft = {
  customers: 10,
  stations: null,
  family: "C",
  regime: "medium",
  phi: null,
  seed: 0,
  sigma: 0.05,
  rho: 0.5,
  capacity: 1.5,
  rate: 0.25,
  charge_rate: 1.0,
  horizon: 2.0,
  randomized_window_starts: false,
};

/** Request body for POST /api/preview: drop the null optionals. */
export function draftToRequestBody(draft: ConfigDraft): Record<string, unknown> {
  const body: Record<string, unknown> = { ...draft };
  if (draft.stations === null) delete body.stations;
  if (draft.phi === null) delete body.phi;
  return body;
}
