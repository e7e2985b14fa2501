"""Latent-space baselines: multiplier-penalty descent and the two-level
sampler around the inner equality solver.

Runs a handful of descent restarts, harvests their best feasible designs,
then lets the outer sampler propose shapes whose wing equalities the inner
solver closes.
"""

import json

import numpy as np

from uavgen import losses as ls
from uavgen import zspace as zs
from uavgen.decoders import default_decoders
from uavgen.optimizers import (
    ALMGDConfig,
    IGDConfig,
    OuterSearchConfig,
    alm_gd_optimize,
    outer_search,
)

decs = default_decoders()

print("== gradient descent with adaptive multipliers (4 restarts) ==")
rng = np.random.default_rng(0)
z0 = zs.sample_uniform(rng, 4)
record = alm_gd_optimize(
    z0, decs,
    ALMGDConfig(max_steps=2500, lr=0.025, alm=ls.ALMConfig(warmup_epochs=25, gamma=2.5e-2)),
)
print(json.dumps(record.summary(), indent=2))
print("steps to first feasibility per restart:", record.first_feasible_step.tolist())
print("harvested objectives:", np.round(record.harvest_objective, 3).tolist())

print("\n== outer sampling with the inner equality solver (20 proposals) ==")
result = outer_search(
    OuterSearchConfig(budget=20, sampler="trust-region", seed=1, igd=IGDConfig(max_steps=120)),
    decs,
)
print(f"best penalized objective: {result['best_penalized']:.3f}")
print(f"best raw objective:       {result['best_objective']:.3f} "
      f"(feasible: {result['best_feasible']})")
print(f"geometry evaluations:     {result['total_geometry_evals']}")
print("incumbent trace:", [round(v, 3) for v in result["best_so_far"]])
