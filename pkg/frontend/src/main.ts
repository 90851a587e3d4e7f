/** DOM wiring for the configuration studio. All numbers shown here come
 * from service payloads; the client computes nothing domain-side.
 */

import { gammaBars, gammaPoints, windowRows } from "./charts";
import { buildScene, drawScene, SceneError } from "./scene";
import { Studio } from "./studio";
import type { HistoryEntry } from "./studio";
import type { ConfigDraft, PreviewPayload } from "./types";
import { DEFAULT_DRAFT } from "./types";

const $ = <T extends HTMLElement>(id: string): T => {
  const el = document.getElementById(id);
  if (!el) throw new Error(`missing element #${id}`);
  return el as T;
};

async function previewTransport(body: Record<string, unknown>) {
  const response = await fetch("/api/preview", {
    method: "POST",
    headers: { "Content-Type": "application/json" },
    body: JSON.stringify(body),
  });
  return { status: response.status, body: await response.json() };
}

const studio = new Studio(previewTransport, {
  onPreview: renderPreview,
  onFieldErrors: renderFieldErrors,
  onBanner: renderBanner,
  onHistory: renderHistory,
});

/* ---------- form ---------- */

interface FieldSpec {
  key: keyof ConfigDraft;
  label: string;
  step?: string;
  optional?: boolean;
}

const NUMBER_FIELDS: FieldSpec[] = [
  { key: "customers", label: "customers" },
  { key: "stations", label: "stations (blank = auto)", optional: true },
  { key: "seed", label: "seed" },
  { key: "phi", label: "window width fraction (blank = regime)", step: "0.05", optional: true },
  { key: "sigma", label: "cluster spread", step: "0.01" },
  { key: "rho", label: "clustered share", step: "0.05" },
  { key: "capacity", label: "cargo capacity", step: "0.1" },
  { key: "rate", label: "energy per distance", step: "0.05" },
  { key: "charge_rate", label: "recharge rate", step: "0.1" },
  { key: "horizon", label: "planning horizon", step: "0.1" },
];

function buildForm(): void {
  const form = $("config-form");
  for (const spec of NUMBER_FIELDS) {
    const wrap = document.createElement("label");
    wrap.className = "field";
    wrap.textContent = spec.label;
    const input = document.createElement("input");
    input.type = "number";
    input.id = `field-${spec.key}`;
    if (spec.step) input.step = spec.step;
    const initial = DEFAULT_DRAFT[spec.key];
    input.value = initial === null ? "" : String(initial);
    input.addEventListener("input", () => {
      const raw = input.value.trim();
      if (raw === "" && spec.optional) {
        studio.applyChange(spec.key, null);
        return;
      }
      const parsed = Number(raw);
      if (!Number.isFinite(parsed)) return;
      studio.applyChange(spec.key, parsed);
    });
    const err = document.createElement("span");
    err.className = "field-error";
    err.id = `error-${spec.key}`;
    wrap.appendChild(input);
    wrap.appendChild(err);
    form.appendChild(wrap);
  }
}

function wireSelects(): void {
  const family = $<HTMLSelectElement>("field-family");
  family.value = DEFAULT_DRAFT.family;
  family.addEventListener("change", () => studio.applyChange("family", family.value));
  const regime = $<HTMLSelectElement>("field-regime");
  regime.value = DEFAULT_DRAFT.regime;
  regime.addEventListener("change", () => studio.applyChange("regime", regime.value));
  const randomized = $<HTMLInputElement>("field-randomized");
  randomized.addEventListener("change", () =>
    studio.applyChange("randomized_window_starts", randomized.checked),
  );
  const lock = $<HTMLInputElement>("seed-lock");
  lock.addEventListener("change", () => studio.setSeedLock(lock.checked));
}

/* ---------- rendering ---------- */

function renderPreview(payload: PreviewPayload): void {
  let scene;
  try {
    scene = buildScene(payload);
  } catch (err) {
    if (err instanceof SceneError) {
      renderBanner(`cannot render payload: ${err.message}`);
      return; // previous scene stays on the canvas
    }
    throw err;
  }
  drawScene($<HTMLCanvasElement>("topology"), scene);
  $("scene-caption").textContent =
    `${scene.counts.depots} depot, ${scene.counts.customers} customers, ` +
    `${scene.counts.stations} stations`;

  $("preview-name").textContent = payload.name;
  const badge = $("status-badge");
  badge.textContent = `${payload.status} / ${payload.feasibility}`;
  badge.className = `badge badge-${payload.feasibility}`;
  $("vehicle-line").textContent =
    `battery ${payload.vehicle.battery.toFixed(4)}, ` +
    `range ${payload.vehicle.max_range.toFixed(4)}, ` +
    `capacity ${payload.vehicle.capacity}`;

  const seedInput = $<HTMLInputElement>("field-seed");
  seedInput.value = String(payload.seed);

  renderViolations(payload);
  renderWindows(payload);

  const canExport = studio.exportText() !== null;
  $<HTMLButtonElement>("export-text").disabled = !canExport;
  $<HTMLButtonElement>("export-meta").disabled = !canExport;
}

function renderViolations(payload: PreviewPayload): void {
  const list = $("violations");
  list.textContent = "";
  const violations = payload.metadata.screening.violations;
  if (violations.length === 0) {
    const li = document.createElement("li");
    li.className = "ok";
    li.textContent = "screening passed for every customer";
    list.appendChild(li);
    return;
  }
  for (const v of violations) {
    const li = document.createElement("li");
    li.textContent =
      `customer ${v.customer_id}: ${v.condition} ` +
      `(${v.measured.toFixed(4)} vs ${v.threshold.toFixed(4)})`;
    list.appendChild(li);
  }
}

function renderWindows(payload: PreviewPayload): void {
  const svg = $("window-chart");
  svg.textContent = "";
  const rows = windowRows(payload);
  const rowH = 8;
  svg.setAttribute("viewBox", `0 0 240 ${rows.length * rowH + 4}`);
  rows.forEach((row, i) => {
    const rect = document.createElementNS("http://www.w3.org/2000/svg", "rect");
    rect.setAttribute("x", String(row.readyFrac * 240));
    rect.setAttribute("y", String(i * rowH + 2));
    rect.setAttribute("width", String(Math.max(1, (row.dueFrac - row.readyFrac) * 240)));
    rect.setAttribute("height", String(rowH - 3));
    rect.setAttribute("class", "window-bar");
    const title = document.createElementNS("http://www.w3.org/2000/svg", "title");
    title.textContent = `customer ${row.id}`;
    rect.appendChild(title);
    svg.appendChild(rect);
  });
}

function renderFieldErrors(errors: Record<string, string>): void {
  for (const spec of NUMBER_FIELDS) {
    const el = document.getElementById(`error-${spec.key}`);
    if (el) el.textContent = errors[spec.key] ?? "";
  }
  const general = errors[""] ?? errors.family ?? errors.regime ?? "";
  $("form-error").textContent = general;
}

function renderBanner(message: string | null): void {
  const banner = $("banner");
  banner.textContent = message ?? "";
  banner.style.display = message ? "block" : "none";
}

function renderHistory(entries: HistoryEntry[]): void {
  const list = $("history");
  list.textContent = "";
  for (const entry of [...entries].reverse().slice(0, 30)) {
    const li = document.createElement("li");
    const button = document.createElement("button");
    button.type = "button";
    button.textContent = `${entry.name} (${entry.status})`;
    button.addEventListener("click", () => restoreEntry(entry));
    li.appendChild(button);
    list.appendChild(li);
  }
}

function restoreEntry(entry: HistoryEntry): void {
  studio.restore(entry);
  for (const spec of NUMBER_FIELDS) {
    const input = document.getElementById(`field-${spec.key}`) as HTMLInputElement | null;
    if (!input) continue;
    const value = entry.draft[spec.key];
    input.value = value === null ? "" : String(value);
  }
  $<HTMLSelectElement>("field-family").value = entry.draft.family;
  $<HTMLSelectElement>("field-regime").value = entry.draft.regime;
}

/* ---------- export ---------- */

function download(filename: string, text: string, mime: string): void {
  const blob = new Blob([text], { type: mime });
  const url = URL.createObjectURL(blob);
  const anchor = document.createElement("a");
  anchor.href = url;
  anchor.download = filename;
  anchor.click();
  URL.revokeObjectURL(url);
}

function wireExport(): void {
  $("export-text").addEventListener("click", () => {
    const text = studio.exportText();
    const name = studio.exportName();
    if (text !== null && name !== null) download(`${name}.txt`, text, "text/plain");
  });
  $("export-meta").addEventListener("click", () => {
    const meta = studio.exportMetadata();
    const name = studio.exportName();
    if (meta !== null && name !== null) {
      download(`${name}.meta.json`, meta, "application/json");
    }
  });
}

/* ---------- acceptance sweep panel ---------- */

async function runSweep(): Promise<void> {
  const status = $("sweep-status");
  const button = $<HTMLButtonElement>("sweep-run");
  const sizes = $<HTMLInputElement>("sweep-sizes")
    .value.split(",")
    .map((token) => Number(token.trim()))
    .filter((n) => Number.isFinite(n) && n > 0);
  if (sizes.length === 0) {
    status.textContent = "enter sizes like 10,30,50";
    return;
  }
  button.disabled = true;
  status.textContent = "running...";
  try {
    const submit = await fetch("/api/bench", {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ sizes, per_cell: 5 }),
    });
    if (!submit.ok) {
      status.textContent = `service answered ${submit.status}`;
      return;
    }
    const { batch_id } = await submit.json();
    for (;;) {
      await new Promise((resolve) => setTimeout(resolve, 1000));
      const poll = await fetch(`/api/batch/${batch_id}`);
      const job = await poll.json();
      if (job.state === "failed") {
        status.textContent = `sweep failed: ${job.error}`;
        return;
      }
      if (job.state === "finished") {
        renderSweep(job.result.gamma_curve ?? {});
        status.textContent = "";
        return;
      }
      status.textContent = "running...";
    }
  } catch (err) {
    status.textContent = `sweep failed: ${String(err)}`;
  } finally {
    button.disabled = false;
  }
}

function renderSweep(curve: Record<string, number>): void {
  const svg = $("gamma-chart");
  svg.textContent = "";
  for (const bar of gammaBars(gammaPoints(curve))) {
    const rect = document.createElementNS("http://www.w3.org/2000/svg", "rect");
    rect.setAttribute("x", String(bar.x));
    rect.setAttribute("y", String(bar.y));
    rect.setAttribute("width", String(bar.w));
    rect.setAttribute("height", String(bar.h));
    rect.setAttribute("class", "gamma-bar");
    const title = document.createElementNS("http://www.w3.org/2000/svg", "title");
    title.textContent = bar.label;
    rect.appendChild(title);
    svg.appendChild(rect);
  }
}

/* ---------- boot ---------- */

buildForm();
wireSelects();
wireExport();
$("sweep-run").addEventListener("click", () => void runSweep());
void studio.refresh();
