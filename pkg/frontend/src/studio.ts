/** Studio controller: config draft, debounced previews, history.
 *
 * Every preview request carries a monotone sequence number; a response
 * only applies while it is still the newest one issued, so a slow early
 * answer can never clobber a fast late one. Field edits debounce at
 * 250 ms. The controller is DOM-free and takes its transport and timers
 * by injection.
 */

import type { ConfigDraft, PreviewPayload } from "./types";
import { DEFAULT_DRAFT, draftToRequestBody } from "./types";

export const DEBOUNCE_MS = 250;

export interface TransportResponse {
  status: number;
  body: unknown;
}

export type Transport = (body: Record<string, unknown>) => Promise<TransportResponse>;

export interface HistoryEntry {
  name: string;
  seed: number;
  status: string;
  feasibility: string;
  draft: ConfigDraft;
}

export interface StudioEvents {
  onPreview?: (payload: PreviewPayload) => void;
  onFieldErrors?: (errors: Record<string, string>) => void;
  onBanner?: (message: string | null) => void;
  onHistory?: (entries: HistoryEntry[]) => void;
}

interface Timers {
  set: (fn: () => void, ms: number) => ReturnType<typeof setTimeout>;
  clear: (handle: ReturnType<typeof setTimeout>) => void;
}

const NUMERIC_FIELDS = new Set([
  "customers", "stations", "phi", "seed", "sigma", "rho",
  "capacity", "rate", "charge_rate", "horizon",
]);
const KNOWN_FIELDS = new Set([
  ...NUMERIC_FIELDS, "family", "regime", "randomized_window_starts",
]);

export class Studio {
  draft: ConfigDraft;
  preview: PreviewPayload | null = null;
  history: HistoryEntry[] = [];
  fieldErrors: Record<string, string> = {};
  seedLocked = false;

  private seq = 0;
  private pending: ReturnType<typeof setTimeout> | null = null;
  private transport: Transport;
  private events: StudioEvents;
  private timers: Timers;

  constructor(transport: Transport, events: StudioEvents = {}, timers?: Timers) {
    this.transport = transport;
    this.events = events;
    this.timers = timers ?? {
      set: (fn, ms) => setTimeout(fn, ms),
      clear: (handle) => clearTimeout(handle),
    };
    this.draft = { ...DEFAULT_DRAFT };
  }

  /** Edit one config field; schedules a debounced preview. */
  applyChange(field: keyof ConfigDraft, value: unknown): void {
    if (!KNOWN_FIELDS.has(field)) {
      throw new Error(`unknown config field ${JSON.stringify(field)}`);
    }
    (this.draft as unknown as Record<string, unknown>)[field] = value;
    // An unlocked seed advances on every non-seed edit, so each tweak
    // shows a fresh draw; a locked seed makes edits true what-ifs.
    if (!this.seedLocked && field !== "seed") {
      this.draft.seed += 1;
    }
    this.schedule();
  }

  setSeedLock(locked: boolean): void {
    this.seedLocked = locked;
  }

  /** Re-issue a previous preview's exact config, seed included. */
  restore(entry: HistoryEntry): void {
    this.draft = { ...entry.draft };
    this.schedule();
  }

  /** Ask for a preview of the current draft right now (no debounce). */
  refresh(): Promise<void> {
    if (this.pending !== null) {
      this.timers.clear(this.pending);
      this.pending = null;
    }
    return this.issue();
  }

  /** Instance text exactly as the service serialized it. */
  exportText(): string | null {
    return this.preview ? this.preview.instance_text : null;
  }

  exportMetadata(): string | null {
    if (!this.preview) return null;
    return JSON.stringify(this.preview.metadata, null, 2) + "\n";
  }

  exportName(): string | null {
    return this.preview ? this.preview.name : null;
  }

  private schedule(): void {
    if (this.pending !== null) {
      this.timers.clear(this.pending);
    }
    this.pending = this.timers.set(() => {
      this.pending = null;
      void this.issue();
    }, DEBOUNCE_MS);
  }

  private async issue(): Promise<void> {
    const mySeq = ++this.seq;
    const snapshot = { ...this.draft };
    let response: TransportResponse;
    try {
      response = await this.transport(draftToRequestBody(snapshot));
    } catch (err) {
      if (mySeq === this.seq) {
        this.events.onBanner?.(`preview request failed: ${String(err)}`);
      }
      return;
    }
    if (mySeq !== this.seq) {
      return; // superseded while in flight
    }
    if (response.status === 422) {
      this.fieldErrors = parseValidationErrors(response.body);
      this.events.onFieldErrors?.(this.fieldErrors);
      return; // scene and preview stay as they were
    }
    if (response.status !== 200) {
      this.events.onBanner?.(`service answered ${response.status}`);
      return;
    }
    const payload = response.body as PreviewPayload;
    this.preview = payload;
    this.fieldErrors = {};
    this.history.push({
      name: payload.name,
      seed: payload.seed,
      status: payload.status,
      feasibility: payload.feasibility,
      draft: snapshot,
    });
    this.events.onFieldErrors?.({});
    this.events.onBanner?.(null);
    this.events.onHistory?.(this.history);
    this.events.onPreview?.(payload);
  }
}

/** Flatten FastAPI's 422 body into field -> message. */
export function parseValidationErrors(body: unknown): Record<string, string> {
  const errors: Record<string, string> = {};
  const detail = (body as { detail?: unknown })?.detail;
  if (typeof detail === "string") {
    errors[""] = detail;
    return errors;
  }
  if (Array.isArray(detail)) {
    for (const item of detail) {
      const loc = Array.isArray(item?.loc) ? item.loc : [];
      const field = String(loc[loc.length - 1] ?? "");
      errors[field] = String(item?.msg ?? "invalid value");
    }
  }
  return errors;
}
