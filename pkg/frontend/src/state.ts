// Pure explorer state: every transition returns a new state object and the
// view renders from it. No domain math happens here; all numbers displayed
// come from server responses or exact arithmetic on them.

import type { GenerateResponse, SweepResponse } from "./types.js";

export interface PinnedDesign {
  zeta: number[];
  metrics: Record<string, number>;
  feasible: boolean;
}

export interface SweepConfig {
  axes: number[];
  grid: number;
}

export interface ExplorerState {
  zetaDim: number;
  zeta: number[];
  zetaRange: [number, number];
  caseName: string;
  cases: string[];
  last: GenerateResponse | null;
  pinned: PinnedDesign[];
  sweep: SweepResponse | null;
  sweepConfig: SweepConfig;
  banner: string | null;
}

export const MAX_PINS = 4;

export function initialState(
  zetaDim: number,
  cases: string[],
  zetaRange: [number, number] = [-1, 1],
): ExplorerState {
  return {
    zetaDim,
    zeta: new Array(zetaDim).fill(0),
    zetaRange,
    caseName: cases[0] ?? "case1",
    cases,
    last: null,
    pinned: [],
    sweep: null,
    sweepConfig: { axes: zetaDim >= 2 ? [0, 1] : [0], grid: 11 },
    banner: null,
  };
}

export function clampZeta(value: number, range: [number, number]): number {
  if (Number.isNaN(value)) return range[0];
  return Math.min(range[1], Math.max(range[0], value));
}

export function setSlider(state: ExplorerState, index: number, value: number): ExplorerState {
  if (index < 0 || index >= state.zetaDim) return state;
  const zeta = state.zeta.slice();
  zeta[index] = clampZeta(value, state.zetaRange);
  return { ...state, zeta };
}

export function setZeta(state: ExplorerState, zeta: number[]): ExplorerState {
  if (zeta.length !== state.zetaDim) return state;
  return { ...state, zeta: zeta.map((v) => clampZeta(v, state.zetaRange)) };
}

export function setCase(state: ExplorerState, caseName: string): ExplorerState {
  if (!state.cases.includes(caseName)) return state;
  return { ...state, caseName };
}

export function applyGenerate(state: ExplorerState, response: GenerateResponse): ExplorerState {
  return { ...state, last: response, banner: null };
}

export function applyError(state: ExplorerState, message: string): ExplorerState {
  // non-blocking: the last rendered view stays
  return { ...state, banner: message };
}

export function applySweep(state: ExplorerState, sweep: SweepResponse): ExplorerState {
  return { ...state, sweep, banner: null };
}

export function setSweepConfig(state: ExplorerState, config: SweepConfig): ExplorerState {
  return { ...state, sweepConfig: config };
}

function sameZeta(a: number[], b: number[]): boolean {
  return a.length === b.length && a.every((v, i) => v === b[i]);
}

export function pinCurrent(state: ExplorerState): ExplorerState {
  if (!state.last) return state;
  const design: PinnedDesign = {
    zeta: state.zeta.slice(),
    metrics: { ...state.last.metrics },
    feasible: state.last.feasible,
  };
  if (state.pinned.some((p) => sameZeta(p.zeta, design.zeta))) return state;
  // append-only within a session, capped at the comparison panel size
  const pinned = [...state.pinned, design].slice(0, MAX_PINS);
  return { ...state, pinned };
}

export function metricDeltas(
  a: Record<string, number>,
  b: Record<string, number>,
): Record<string, number> {
  const out: Record<string, number> = {};
  for (const key of Object.keys(a)) {
    if (key in b) out[key] = a[key] - b[key];
  }
  return out;
}
