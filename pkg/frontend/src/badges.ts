// Metric badges: value comes from the server's report, pass/fail copies the
// server's own feasibility flags; the UI never re-derives feasibility.

import type { GenerateResponse } from "./types.js";

export interface Badge {
  name: string;
  value: number;
  status: "pass" | "fail" | "info";
  detail: string;
}

const BADGE_FLAGS: Record<string, string[]> = {
  C_lift: ["lift"],
  C_wx: ["wx_front", "wx_rear"],
  C_di: ["di_front", "di_rear"],
  C_bb: ["bb"],
  C_boxpl: ["boxpl"],
};

export function buildBadges(response: GenerateResponse): Badge[] {
  const badges: Badge[] = [];
  for (const name of ["O_mass", "C_lift", "C_wx", "C_di", "C_bb", "C_boxpl"]) {
    const value = response.metrics[name];
    if (name === "O_mass") {
      badges.push({ name, value, status: "info", detail: "objective (lower is better)" });
      continue;
    }
    const flags = BADGE_FLAGS[name].map((f) => response.feasibility[f]);
    const pass = flags.every(Boolean);
    badges.push({
      name,
      value,
      status: pass ? "pass" : "fail",
      detail: BADGE_FLAGS[name]
        .map((f) => `${f}: ${response.feasibility[f] ? "ok" : "violated"}`)
        .join(", "),
    });
  }
  return badges;
}

export function allBadgesAgreeWithServer(badges: Badge[], response: GenerateResponse): boolean {
  const failed = badges.some((b) => b.status === "fail");
  return failed === !response.feasible;
}
