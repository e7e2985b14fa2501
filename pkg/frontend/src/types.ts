export interface InfoResponse {
  zeta_dim: number;
  zeta_range: [number, number];
  cases: string[];
  tolerances: Record<string, number>;
  metric_names: string[];
  units: Record<string, string>;
  max_sweep_grid: number;
}

export interface MeshPart {
  name: string;
  vertices: number[];
  faces: number[];
}

export interface GenerateResponse {
  metrics: Record<string, number>;
  feasible: boolean;
  feasibility: Record<string, boolean>;
  latents: Record<string, number[]>;
  z: number[];
  mesh?: { parts: MeshPart[] };
}

export interface SweepCell {
  zeta: number[];
  metrics: Record<string, number>;
  feasible: boolean;
}

export interface SweepResponse {
  axes: number[];
  grid: number;
  ticks: number[];
  cells: SweepCell[];
  order: string;
}
