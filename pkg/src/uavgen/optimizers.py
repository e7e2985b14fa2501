"""Baseline latent-space optimizers over the 22-slot design latent.

ALM-GD: Adam descent on objective + lambda*C + mu/2*C^2 with per-element
adaptive dual updates, batched over independent restarts. An element
auto-stops once it is feasible and its objective has stalled.

iGD: the inner equality solver used by the surrogate-free outer search;
wing placements and lift requirements are reset to a fixed location each
call, then descended against C_lift + C_wx + C_di with the outer
(shape) variables untouched.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from . import losses as ls
from . import tape as tp
from . import zspace as zs
from .aircraft import GEOMETRY_EVALS, geometry_layer
from .cases import get_case
from .decoders import default_decoders
from .evaluation import DEFAULT_TOLERANCES, feasibility_check
from .training import CONSTRAINT_ORDER, TrainConfig, constraint_channels


@dataclass
class ALMGDConfig:
    lr: float = 0.02
    max_steps: int = 5000
    stop_patience: int = 200
    objective_rel_tol: float = 1e-5
    divergence_limit: float = 1e6
    tolerancing: bool = True
    equality_mode: str = "relu"
    huber_width: float = 0.02
    alm: ls.ALMConfig = field(
        default_factory=lambda: ls.ALMConfig(warmup_epochs=40, gamma=2e-2)
    )
    case: str = "case1"
    seed: int = 0

    def channels_config(self):
        return TrainConfig(
            zeta_dim=2,
            batch=16,
            epochs=1,
            equality_mode=self.equality_mode,
            huber_width=self.huber_width,
            tolerancing=self.tolerancing,
        )


@dataclass
class RunRecord:
    method: str
    case: str
    seeds: int
    first_feasible_step: np.ndarray      # -1 where never feasible
    evals_per_run: np.ndarray
    final_objective: np.ndarray
    final_feasible: np.ndarray
    diverged: np.ndarray
    final_z: np.ndarray
    # best feasible iterate snapshot per run (the dataset harvest)
    harvest_objective: np.ndarray        # inf where never feasible
    harvest_z: np.ndarray
    total_geometry_evals: int
    total_flops: int
    wall_seconds: float
    trajectory: list = field(default_factory=list)

    @property
    def harvested(self):
        return np.isfinite(self.harvest_objective)

    def summary(self):
        ok = self.harvested
        return {
            "method": self.method,
            "runs": int(self.seeds),
            "harvested_designs": int(ok.sum()),
            "final_feasible_runs": int(self.final_feasible.sum()),
            "median_steps_to_feasible": (
                float(np.median(self.first_feasible_step[self.first_feasible_step >= 0]))
                if (self.first_feasible_step >= 0).any()
                else None
            ),
            "best_objective": float(self.harvest_objective[ok].min()) if ok.any() else None,
            "mean_evals_per_run": float(self.evals_per_run.mean()),
            "total_geometry_evals": int(self.total_geometry_evals),
            "evals_per_harvested_design": (
                float(self.total_geometry_evals / ok.sum()) if ok.any() else None
            ),
            "wall_seconds": float(self.wall_seconds),
        }


def alm_gd_optimize(z0, decoder_set=None, config=None):
    """Batched ALM gradient descent from (B,22) starts; returns a RunRecord."""
    config = config or ALMGDConfig()
    case = get_case(config.case)
    decoder_set = decoder_set or default_decoders()
    z_vals = zs.clamp_to_bounds(np.array(z0, dtype=np.float64, copy=True))
    b = z_vals.shape[0]
    z = tp.Tensor(z_vals, requires_grad=True)
    opt = tp.AdamState([z], lr=config.lr)
    state = ls.ALMState.zeros(b, len(CONSTRAINT_ORDER), config.alm)
    ch_cfg = config.channels_config()

    active = np.ones(b, dtype=bool)
    first_feasible = np.full(b, -1, dtype=int)
    evals = np.zeros(b, dtype=int)
    diverged = np.zeros(b, dtype=bool)
    obj_hist = np.full((config.stop_patience, b), np.nan)
    last_obj = np.full(b, np.nan)
    last_feasible = np.zeros(b, dtype=bool)
    harvest_obj = np.full(b, np.inf)
    harvest_z = z_vals.copy()
    start_evals = GEOMETRY_EVALS.count
    flops = 0
    t0 = time.time()
    trajectory = []

    for step in range(config.max_steps):
        if not active.any():
            break
        with tp.Tape() as tape:
            craft = zs.build_aircraft(z, decoder_set, case)
            report = geometry_layer(craft, case)
            channels = constraint_channels(report, case, ch_cfg)
            c_mat = tp.stack([channels[k] for k in CONSTRAINT_ORDER], axis=-1)
            obj = report.column("O_mass")
            penalty = tp.sum_(
                tp.Tensor(state.lam) * c_mat + tp.Tensor(state.mu) * c_mat * c_mat * 0.5,
                axis=1,
            )
            loss = tp.sum_((obj + penalty) * active.astype(float))
            tape.backward(loss)
        flops += tape.flops
        evals[active] += 1
        opt.step()
        opt.zero_grad()
        z.values = zs.clamp_to_bounds(z.values)

        ls.alm_update_hypercube(
            np.where(active[:, None], c_mat.values, 0.0), state, step
        )
        feasible, _ = feasibility_check(report)
        obj_vals = obj.values
        newly = feasible & (first_feasible < 0)
        first_feasible[newly] = step + 1
        improved = feasible & (obj_vals < harvest_obj)
        harvest_obj[improved] = obj_vals[improved]
        harvest_z[improved] = z.values[improved]
        last_obj = obj_vals
        last_feasible = feasible

        bad = active & (~np.isfinite(obj_vals) | (obj_vals > config.divergence_limit))
        diverged |= bad
        active &= ~bad

        ring = step % config.stop_patience
        if step >= config.stop_patience:
            past = obj_hist[ring]
            stalled = (
                np.abs(obj_vals - past) / np.maximum(np.abs(past), 1e-12)
                < config.objective_rel_tol
            )
            done = active & feasible & stalled
            active &= ~done
        obj_hist[ring] = obj_vals

        if step % 25 == 0:
            trajectory.append(
                {
                    "step": step,
                    "active": int(active.sum()),
                    "feasible": int(feasible.sum()),
                    "objective_min": float(np.nanmin(obj_vals)),
                }
            )

    return RunRecord(
        method="alm-gd",
        case=case.name,
        seeds=b,
        first_feasible_step=first_feasible,
        evals_per_run=evals,
        final_objective=last_obj,
        final_feasible=last_feasible & ~diverged,
        diverged=diverged,
        final_z=z.values.copy(),
        harvest_objective=harvest_obj,
        harvest_z=harvest_z,
        total_geometry_evals=GEOMETRY_EVALS.count - start_evals,
        total_flops=int(flops),
        wall_seconds=time.time() - t0,
        trajectory=trajectory,
    )


@dataclass
class IGDConfig:
    lr: float = 0.03
    max_steps: int = 500
    tol: float = 1e-3
    tolerancing: bool = True
    case: str = "case1"


def igd_solve(outer_vals, decoder_set=None, config=None):
    """Solve the wing-placement/lift equalities for fixed shape variables.

    outer_vals: (B, len(OUTER_IDX)) values for the outer slots. Inner
    variables reset to the fixed initial location every call. Returns
    (full_z, residuals, converged).
    """
    config = config or IGDConfig()
    case = get_case(config.case)
    decoder_set = decoder_set or default_decoders()
    outer_vals = np.asarray(outer_vals, dtype=np.float64)
    b = outer_vals.shape[0]

    z_full = np.zeros((b, zs.Z_DIM))
    z_full[:, zs.OUTER_IDX] = outer_vals
    for idx, val in zs.IGD_RESET_VALUES.items():
        z_full[:, idx] = val
    y = tp.Tensor(z_full[:, zs.INNER_IDX].copy(), requires_grad=True)
    outer_const = z_full[:, zs.OUTER_IDX].copy()
    opt = tp.AdamState([y], lr=config.lr)
    ch_cfg = TrainConfig(
        zeta_dim=2, batch=16, epochs=1,
        equality_mode="relu", tolerancing=config.tolerancing,
    )

    def assemble():
        cols = [None] * zs.Z_DIM
        for j, idx in enumerate(zs.OUTER_IDX):
            cols[idx] = tp.Tensor(outer_const[:, j])
        for j, idx in enumerate(zs.INNER_IDX):
            cols[idx] = y[:, j]
        return tp.stack(cols, axis=-1)

    residual = None
    for step in range(config.max_steps):
        with tp.Tape() as tape:
            z = assemble()
            craft = zs.build_aircraft(z, decoder_set, case)
            report = geometry_layer(craft, case)
            channels = constraint_channels(report, case, ch_cfg)
            residual = np.stack(
                [channels[k].values for k in ("lift", "wx", "di")], axis=-1
            )
            loss = tp.sum_(channels["lift"] + channels["wx"] + channels["di"])
            if np.all(residual.max(axis=1) <= config.tol):
                break
            tape.backward(loss)
        opt.step()
        opt.zero_grad()
        lo = zs.Z_BOUNDS[zs.INNER_IDX, 0]
        hi = zs.Z_BOUNDS[zs.INNER_IDX, 1]
        y.values = np.clip(y.values, lo, hi)

    converged = residual.max(axis=1) <= config.tol
    z_out = np.zeros((b, zs.Z_DIM))
    z_out[:, zs.OUTER_IDX] = outer_const
    z_out[:, zs.INNER_IDX] = y.values
    return z_out, residual, converged


def penalized_objective(o_mass, c_boxpl, c_bb, a1=5.0, a2=0.1):
    """f = O_mass * psi(C_boxpl) * psi(C_bb), psi(C) = 1 + a1 tanh(C) + a2 C."""

    def psi(c):
        if isinstance(c, tp.Tensor):
            return 1.0 + a1 * tp.tanh(c) + a2 * c
        return 1.0 + a1 * np.tanh(c) + a2 * c

    return o_mass * psi(c_boxpl) * psi(c_bb)


@dataclass
class OuterSearchConfig:
    budget: int = 200
    sampler: str = "trust-region"  # or "uniform"
    shrink_after: int = 20
    seed: int = 0
    case: str = "case1"
    igd: IGDConfig = field(default_factory=IGDConfig)


def outer_search(config=None, decoder_set=None):
    """Surrogate-free outer proposal loop around the inner equality solver.

    Samples outer (shape) variables, solves the equalities with iGD,
    scores the penalized objective, and keeps the incumbent. The
    trust-region sampler halves its box after `shrink_after` consecutive
    non-improving proposals and recenters on the incumbent.
    """
    config = config or OuterSearchConfig()
    case = get_case(config.case)
    decoder_set = decoder_set or default_decoders()
    config.igd.case = case.name
    rng = np.random.default_rng(config.seed)
    lo = zs.Z_BOUNDS[zs.OUTER_IDX, 0].copy()
    hi = zs.Z_BOUNDS[zs.OUTER_IDX, 1].copy()
    center = 0.5 * (lo + hi)
    half = 0.5 * (hi - lo)

    best_f = np.inf
    best_z = None
    best_objective = np.nan
    best_feasible = False
    non_improving = 0
    history = []
    start_evals = GEOMETRY_EVALS.count
    t0 = time.time()

    for it in range(config.budget):
        if config.sampler == "uniform":
            proposal = rng.uniform(zs.Z_BOUNDS[zs.OUTER_IDX, 0], zs.Z_BOUNDS[zs.OUTER_IDX, 1])
        else:
            proposal = np.clip(
                rng.uniform(center - half, center + half),
                zs.Z_BOUNDS[zs.OUTER_IDX, 0],
                zs.Z_BOUNDS[zs.OUTER_IDX, 1],
            )
        z_full, residual, converged = igd_solve(
            proposal[None, :], decoder_set, config.igd
        )
        with tp.no_grad():
            craft = zs.build_aircraft(tp.Tensor(z_full), decoder_set, case)
            report = geometry_layer(craft, case)
        f = penalized_objective(
            report.column("O_mass").values,
            report.column("C_boxpl").values,
            report.column("C_bb").values,
        )[0]
        feasible, _ = feasibility_check(report)
        if f < best_f:
            best_f = f
            best_z = z_full[0].copy()
            best_objective = float(report.column("O_mass").values[0])
            best_feasible = bool(feasible[0])
            if config.sampler == "trust-region":
                center = best_z[zs.OUTER_IDX].copy()
            non_improving = 0
        else:
            non_improving += 1
            if config.sampler == "trust-region" and non_improving >= config.shrink_after:
                half *= 0.5
                non_improving = 0
        history.append(float(best_f))

    return {
        "method": f"igd-outer/{config.sampler}",
        "case": case.name,
        "best_penalized": float(best_f),
        "best_objective": best_objective,
        "best_feasible": best_feasible,
        "best_z": best_z,
        "best_so_far": history,
        "total_geometry_evals": GEOMETRY_EVALS.count - start_evals,
        "wall_seconds": time.time() - t0,
    }
