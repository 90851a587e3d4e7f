import type { PreviewPayload, ViolationPayload } from "../src/types";
import type { Transport, TransportResponse } from "../src/studio";

export function makePayload(
  customers: number,
  stations: number,
  overrides: Partial<PreviewPayload> = {},
  violations: ViolationPayload[] = [],
): PreviewPayload {
  const nodes: PreviewPayload["nodes"] = [{ id: 0, kind: "d", x: 0.5, y: 0.5 }];
  for (let i = 1; i <= customers; i++) {
    nodes.push({
      id: i,
      kind: "c",
      x: 0.1 + (0.8 * i) / (customers + 1),
      y: 0.3,
      demand: 0.2,
      ready: 0.1 * i,
      due: 0.1 * i + 0.5,
      service: 0.02,
    });
  }
  for (let j = 1; j <= stations; j++) {
    nodes.push({ id: customers + j, kind: "f", x: 0.2 * j, y: 0.8 });
  }
  return {
    name: `${customers}C${stations}S_C_medium_seed00000`,
    status: "accepted",
    feasibility: "feasible",
    seed: 0,
    metadata: { screening: { passed: violations.length === 0, violations } },
    instance_text: `instance ${customers}C${stations}S\n`,
    nodes,
    vehicle: {
      capacity: 1.5,
      battery: 0.1,
      consumption_rate: 0.25,
      charge_rate: 1.0,
      max_range: 0.4,
    },
    horizon: 2.0,
    station_default: stations,
    ...overrides,
  };
}

export interface RecordedCall {
  body: Record<string, unknown>;
  resolve: (response: TransportResponse) => void;
}

/** Transport whose responses the test releases by hand. */
export function deferredTransport(): { calls: RecordedCall[]; transport: Transport } {
  const calls: RecordedCall[] = [];
  const transport: Transport = (body) =>
    new Promise((resolve) => {
      calls.push({ body, resolve });
    });
  return { calls, transport };
}

/** Drain pending microtasks and zero-delay timers. */
export function flush(): Promise<void> {
  return new Promise((resolve) => setTimeout(resolve, 0));
}

export class FakeTimers {
  private queue: { fn: () => void; id: number }[] = [];
  private nextId = 1;

  set = (fn: () => void, _ms: number): ReturnType<typeof setTimeout> => {
    const id = this.nextId++;
    this.queue.push({ fn, id });
    return id as unknown as ReturnType<typeof setTimeout>;
  };

  clear = (handle: ReturnType<typeof setTimeout>): void => {
    this.queue = this.queue.filter((t) => t.id !== (handle as unknown as number));
  };

  get pendingCount(): number {
    return this.queue.length;
  }

  fire(): void {
    const items = [...this.queue];
    this.queue = [];
    for (const item of items) item.fn();
  }
}
