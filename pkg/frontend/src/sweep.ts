// Sweep grid helpers: mapping between flat cell order and grid positions,
// the zeta a cell represents, and color/hatching derivation from server
// metrics. Clicking a cell loads its zeta into the sliders.

import type { SweepResponse } from "./types.js";

export interface CellView {
  row: number;
  col: number;
  zeta: number[];
  objective: number;
  feasible: boolean;
  color: string;
  hatched: boolean;
}

export function cellPosition(flat: number, response: SweepResponse): { row: number; col: number } {
  if (response.axes.length === 1) return { row: 0, col: flat };
  return { row: Math.floor(flat / response.grid), col: flat % response.grid };
}

export function objectiveRange(response: SweepResponse): { lo: number; hi: number } {
  const values = response.cells.map((c) => c.metrics.O_mass);
  return { lo: Math.min(...values), hi: Math.max(...values) };
}

/** Blue (best) to red (worst) ramp over the sweep's own objective range. */
export function objectiveColor(value: number, lo: number, hi: number): string {
  const t = hi > lo ? (value - lo) / (hi - lo) : 0;
  const r = Math.round(40 + 200 * t);
  const b = Math.round(240 - 200 * t);
  return `rgb(${r},80,${b})`;
}

export function cellViews(response: SweepResponse): CellView[] {
  const { lo, hi } = objectiveRange(response);
  return response.cells.map((cell, flat) => {
    const { row, col } = cellPosition(flat, response);
    return {
      row,
      col,
      zeta: cell.zeta,
      objective: cell.metrics.O_mass,
      feasible: cell.feasible,
      color: objectiveColor(cell.metrics.O_mass, lo, hi),
      hatched: !cell.feasible,
    };
  });
}

export function axisLabels(response: SweepResponse): number[] {
  return response.ticks;
}
