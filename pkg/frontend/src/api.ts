// Thin HTTP client. Generate requests are latest-wins: a newer request
// aborts the in-flight one, and stale responses are dropped by sequence
// number even if they race past the abort.

import type { GenerateResponse, InfoResponse, SweepResponse } from "./types.js";

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ApiClient {
  private seq = 0;
  private controller: AbortController | null = null;

  constructor(
    private base: string,
    private fetchImpl: FetchLike = (u, i) => fetch(u, i),
  ) {}

  async info(): Promise<InfoResponse> {
    const resp = await this.fetchImpl(`${this.base}/api/info`);
    if (!resp.ok) throw new Error(`info failed: ${resp.status}`);
    return (await resp.json()) as InfoResponse;
  }

  /** Resolves null for superseded requests. */
  async generate(zeta: number[], caseName: string): Promise<GenerateResponse | null> {
    const mySeq = ++this.seq;
    this.controller?.abort();
    this.controller = new AbortController();
    let resp: Response;
    try {
      resp = await this.fetchImpl(`${this.base}/api/generate`, {
        method: "POST",
        headers: { "Content-Type": "application/json" },
        body: JSON.stringify({ zeta, case: caseName }),
        signal: this.controller.signal,
      });
    } catch (err) {
      if ((err as Error).name === "AbortError") return null;
      throw err;
    }
    if (mySeq !== this.seq) return null; // a newer request won
    if (!resp.ok) {
      const body = await resp.json().catch(() => ({ error: `${resp.status}` }));
      throw new Error((body as { error?: string }).error ?? `generate failed: ${resp.status}`);
    }
    return (await resp.json()) as GenerateResponse;
  }

  async sweep(
    axes: number[],
    grid: number,
    baseZeta: number[],
    caseName: string,
  ): Promise<SweepResponse> {
    const resp = await this.fetchImpl(`${this.base}/api/sweep`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ axes, grid, base_zeta: baseZeta, case: caseName }),
    });
    if (!resp.ok) {
      const body = await resp.json().catch(() => ({ error: `${resp.status}` }));
      throw new Error((body as { error?: string }).error ?? `sweep failed: ${resp.status}`);
    }
    return (await resp.json()) as SweepResponse;
  }
}

/** Trailing-edge debounce used for slider streams. */
export function debounce<A extends unknown[]>(
  fn: (...args: A) => void,
  waitMs: number,
  timers: { set: typeof setTimeout; clear: typeof clearTimeout } = {
    set: setTimeout,
    clear: clearTimeout,
  },
): (...args: A) => void {
  let handle: ReturnType<typeof setTimeout> | null = null;
  return (...args: A) => {
    if (handle !== null) timers.clear(handle);
    handle = timers.set(() => {
      handle = null;
      fn(...args);
    }, waitMs);
  };
}
