// DOM wiring: sliders drive debounced generate calls; the sweep panel runs
// 1D/2D latent sweeps; pins collect designs for side-by-side deltas.

import { ApiClient, debounce } from "./api.js";
import { buildBadges } from "./badges.js";
import {
  ExplorerState,
  applyError,
  applyGenerate,
  applySweep,
  initialState,
  metricDeltas,
  pinCurrent,
  setCase,
  setSlider,
  setZeta,
} from "./state.js";
import { cellViews } from "./sweep.js";
import { Viewer } from "./viewer.js";

const DEBOUNCE_MS = 150;

const root = document.querySelector<HTMLDivElement>("#app");
if (!root) throw new Error("missing #app");

const params = new URLSearchParams(window.location.search);
const apiBase = params.get("api") ?? "http://127.0.0.1:8787";
const api = new ApiClient(apiBase);

let state: ExplorerState;
let viewer: Viewer;

function fmt(v: number): string {
  return Math.abs(v) >= 100 ? v.toFixed(1) : v.toPrecision(4);
}

async function refresh(): Promise<void> {
  try {
    const response = await api.generate(state.zeta, state.caseName);
    if (!response) return; // superseded
    state = applyGenerate(state, response);
  } catch (err) {
    state = applyError(state, (err as Error).message);
  }
  renderOutputs();
}

const refreshDebounced = debounce(() => void refresh(), DEBOUNCE_MS);

function renderSliders(): void {
  const panel = document.querySelector<HTMLDivElement>("#sliders")!;
  panel.innerHTML = "";
  state.zeta.forEach((value, i) => {
    const row = document.createElement("div");
    row.className = "slider-row";
    const label = document.createElement("label");
    label.textContent = `ζ${i + 1}`;
    const input = document.createElement("input");
    input.type = "range";
    input.min = String(state.zetaRange[0]);
    input.max = String(state.zetaRange[1]);
    input.step = "0.01";
    input.value = String(value);
    input.dataset.axis = String(i);
    const readout = document.createElement("span");
    readout.textContent = fmt(value);
    input.addEventListener("input", () => {
      state = setSlider(state, i, parseFloat(input.value));
      readout.textContent = fmt(state.zeta[i]);
      refreshDebounced();
    });
    row.append(label, input, readout);
    panel.append(row);
  });
}

function syncSliders(): void {
  document.querySelectorAll<HTMLInputElement>("#sliders input").forEach((input) => {
    const axis = Number(input.dataset.axis);
    input.value = String(state.zeta[axis]);
    (input.nextElementSibling as HTMLSpanElement).textContent = fmt(state.zeta[axis]);
  });
}

function renderOutputs(): void {
  const banner = document.querySelector<HTMLDivElement>("#banner")!;
  banner.textContent = state.banner ?? "";
  banner.style.display = state.banner ? "block" : "none";

  if (!state.last) return;
  const badgePanel = document.querySelector<HTMLDivElement>("#badges")!;
  badgePanel.innerHTML = "";
  for (const badge of buildBadges(state.last)) {
    const el = document.createElement("div");
    el.className = `badge ${badge.status}`;
    el.title = badge.detail;
    el.innerHTML = `<span class="badge-name">${badge.name}</span><span>${fmt(badge.value)}</span>`;
    badgePanel.append(el);
  }
  const verdict = document.querySelector<HTMLDivElement>("#verdict")!;
  verdict.textContent = state.last.feasible ? "feasible" : "infeasible";
  verdict.className = state.last.feasible ? "pass" : "fail";

  if (state.last.mesh) viewer.setParts(state.last.mesh.parts, state.last.feasible);
  renderPins();
}

function renderPins(): void {
  const panel = document.querySelector<HTMLDivElement>("#pins")!;
  panel.innerHTML = "";
  const reference = state.pinned[0];
  state.pinned.forEach((pin, i) => {
    const card = document.createElement("div");
    card.className = "pin-card";
    const title = `#${i + 1} ζ=[${pin.zeta.map((v) => v.toFixed(2)).join(", ")}]`;
    const lines = [`<div class="pin-title">${title}</div>`];
    for (const [name, value] of Object.entries(pin.metrics)) {
      let text = `${name}: ${fmt(value)}`;
      if (reference && i > 0) {
        const delta = metricDeltas(pin.metrics, reference.metrics)[name];
        text += ` (Δ ${delta >= 0 ? "+" : ""}${fmt(delta)})`;
      }
      lines.push(`<div>${text}</div>`);
    }
    lines.push(`<div>${pin.feasible ? "feasible" : "infeasible"}</div>`);
    card.innerHTML = lines.join("");
    card.addEventListener("click", () => {
      state = setZeta(state, pin.zeta);
      syncSliders();
      void refresh();
    });
    panel.append(card);
  });
}

async function runSweep(): Promise<void> {
  const axisSel = document.querySelector<HTMLSelectElement>("#sweep-axes")!;
  const gridInput = document.querySelector<HTMLInputElement>("#sweep-grid")!;
  const axes = axisSel.value === "1d" ? [0] : [0, 1];
  const grid = Math.min(21, Math.max(2, Number(gridInput.value) || 11));
  try {
    const sweep = await api.sweep(axes, grid, state.zeta, state.caseName);
    state = applySweep(state, sweep);
  } catch (err) {
    state = applyError(state, (err as Error).message);
  }
  renderSweep();
  renderOutputs();
}

function renderSweep(): void {
  const panel = document.querySelector<HTMLDivElement>("#sweep-grid-view")!;
  panel.innerHTML = "";
  if (!state.sweep) return;
  const views = cellViews(state.sweep);
  const grid = state.sweep.grid;
  panel.style.gridTemplateColumns = `repeat(${grid}, 18px)`;
  for (const cell of views) {
    const el = document.createElement("div");
    el.className = "sweep-cell" + (cell.hatched ? " hatched" : "");
    el.style.background = cell.color;
    el.title = `ζ=[${cell.zeta.map((v) => v.toFixed(2)).join(", ")}] O_mass=${fmt(cell.objective)}${cell.feasible ? "" : " (infeasible)"}`;
    el.addEventListener("click", () => {
      state = setZeta(state, cell.zeta);
      syncSliders();
      void refresh();
    });
    panel.append(el);
  }
}

async function boot(): Promise<void> {
  const info = await api.info();
  state = initialState(info.zeta_dim, info.cases, info.zeta_range);
  const caseSel = document.querySelector<HTMLSelectElement>("#case")!;
  caseSel.innerHTML = info.cases.map((c) => `<option>${c}</option>`).join("");
  caseSel.addEventListener("change", () => {
    state = setCase(state, caseSel.value);
    void refresh();
  });
  viewer = new Viewer(document.querySelector<HTMLCanvasElement>("#canvas")!);
  renderSliders();
  document.querySelector<HTMLButtonElement>("#pin")!.addEventListener("click", () => {
    state = pinCurrent(state);
    renderPins();
  });
  document
    .querySelector<HTMLButtonElement>("#run-sweep")!
    .addEventListener("click", () => void runSweep());
  await refresh();
}

void boot();
