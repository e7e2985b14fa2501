"""Feasibility adjudication, diversity scoring, and model evaluation sweeps."""

from __future__ import annotations

import time
from dataclasses import asdict, dataclass, field

import numpy as np

from . import losses as ls
from . import tape as tp
from . import zspace as zs
from .aircraft import GEOMETRY_EVALS, geometry_layer
from .cases import get_case
from .coordinator import sample_zeta_uniform


@dataclass
class FeasibilityTolerances:
    wx_span_fraction: float = 0.02
    dihedral_front_deg: float = 0.5
    dihedral_rear_deg: float = 2.0
    lift_fraction: float = 0.02
    slack: float = 1e-3

    def __post_init__(self):
        for name, value in asdict(self).items():
            if value < 0:
                raise ValueError(f"tolerance {name} must be non-negative")


DEFAULT_TOLERANCES = FeasibilityTolerances()


def feasibility_check(report, tolerances=None):
    """Per-sample feasibility flags plus the per-constraint breakdown.

    Equality constraints compare in physical units (meters against a span
    fraction, radians against the per-wing bands, newtons against a lift
    fraction); the two inequality channels are already pure violations.
    """
    tol = tolerances or DEFAULT_TOLERANCES
    raw = report.raw
    wx1, wx2 = (t.values for t in raw["wx_m"])
    di1, di2 = (t.values for t in raw["di_rad"])
    b1, b2 = (t.values for t in raw["spans_m"])
    l_req = raw["lift_required_n"].values
    l1, l2 = (t.values for t in raw["lift_supplied_n"])
    s = tol.slack
    checks = {
        "wx_front": wx1 <= tol.wx_span_fraction * b1 + s,
        "wx_rear": wx2 <= tol.wx_span_fraction * b2 + s,
        "di_front": di1 <= np.deg2rad(tol.dihedral_front_deg) + s,
        "di_rear": di2 <= np.deg2rad(tol.dihedral_rear_deg) + s,
        "lift": np.abs(l_req - (l1 + l2)) <= tol.lift_fraction * l_req + s,
        "bb": report.column("C_bb").values <= s,
        "boxpl": report.column("C_boxpl").values <= s,
    }
    feasible = np.ones_like(l_req, dtype=bool)
    for flag in checks.values():
        feasible &= flag
    return feasible, checks


def dpp_score(samples, sigma=1.0, repeats=20, batch=35, seed=0):
    """Protocol diversity score: mean similarity-determinant loss over
    `repeats` random fixed-size batches of z-score-normalized samples.

    Zero means highly diverse; large values indicate collapse.
    """
    samples = np.asarray(samples, dtype=np.float64)
    if samples.shape[0] < batch:
        raise ValueError(f"need at least {batch} samples, got {samples.shape[0]}")
    mean = samples.mean(axis=0)
    std = samples.std(axis=0)
    keep = std > 1e-12
    if keep.any():
        normed = (samples[:, keep] - mean[keep]) / std[keep]
    else:  # fully collapsed pool: all pairwise distances are zero
        normed = np.zeros((samples.shape[0], 1))
    rng = np.random.default_rng(seed)
    cfg = ls.DPPConfig(sigma=sigma, eps=1e-2)
    scores = []
    with tp.no_grad():
        for _ in range(repeats):
            idx = rng.choice(samples.shape[0], size=batch, replace=False)
            scores.append(ls.dpp_loss(tp.Tensor(normed[idx]), cfg).values.item())
    return float(np.mean(scores))


@dataclass
class EvalReport:
    case: str
    seeds: int
    samples_per_seed: int
    feasibility_mean: float
    feasibility_best: float
    feasibility_worst: float
    per_seed_feasibility: list
    constraint_satisfaction: dict
    objective_p5: float
    objective_p95: float
    objective_median: float
    dpp: float
    geometry_evals: int
    flops: int
    wall_seconds: float

    def to_dict(self):
        return asdict(self)

    def table(self):
        rows = [
            ("feasibility mean/best/worst",
             f"{self.feasibility_mean:.3f} / {self.feasibility_best:.3f} / {self.feasibility_worst:.3f}"),
            ("objective P5 / median / P95",
             f"{self.objective_p5:.3f} / {self.objective_median:.3f} / {self.objective_p95:.3f}"),
            ("diversity (DPP score)", f"{self.dpp:.1f}"),
            ("geometry evaluations", str(self.geometry_evals)),
            ("FLOPs", f"{self.flops:.3e}"),
            ("wall seconds", f"{self.wall_seconds:.1f}"),
        ]
        width = max(len(r[0]) for r in rows)
        return "\n".join(f"{name:<{width}}  {value}" for name, value in rows)


def evaluate_model(net, decoder_set, case, seeds=10, samples_per_seed=1000,
                   tolerances=None, dpp_sigma=1.0, base_seed=1000):
    """Uniform-zeta sweep: per-seed feasibility, objective percentiles,
    pooled diversity score, and compute counters."""
    case = get_case(case)
    start_evals = GEOMETRY_EVALS.count
    t0 = time.time()
    per_seed = []
    sat_counts = {}
    objectives = []
    designs = []
    flops = 0
    for s in range(seeds):
        rng = np.random.default_rng(base_seed + s)
        zeta = sample_zeta_uniform(rng, samples_per_seed, net.zeta_dim)
        with tp.Tape() as tape:
            z, _ = net.forward(tp.Tensor(zeta))
            craft = zs.build_aircraft(z, decoder_set, case)
            report = geometry_layer(craft, case)
            design = zs.design_vector(craft)
        flops += tape.flops
        feasible, checks = feasibility_check(report, tolerances)
        per_seed.append(float(feasible.mean()))
        for name, flag in checks.items():
            sat_counts[name] = sat_counts.get(name, 0.0) + float(flag.mean())
        objectives.append(report.column("O_mass").values.copy())
        designs.append(design.values)
    objectives = np.concatenate(objectives)
    designs = np.concatenate(designs, axis=0)
    return EvalReport(
        case=case.name,
        seeds=seeds,
        samples_per_seed=samples_per_seed,
        feasibility_mean=float(np.mean(per_seed)),
        feasibility_best=float(np.max(per_seed)),
        feasibility_worst=float(np.min(per_seed)),
        per_seed_feasibility=[float(v) for v in per_seed],
        constraint_satisfaction={k: v / seeds for k, v in sat_counts.items()},
        objective_p5=float(np.percentile(objectives, 5)),
        objective_p95=float(np.percentile(objectives, 95)),
        objective_median=float(np.percentile(objectives, 50)),
        dpp=dpp_score(designs, sigma=dpp_sigma) if designs.shape[0] >= 35 else float("nan"),
        geometry_evals=GEOMETRY_EVALS.count - start_evals,
        flops=int(flops),
        wall_seconds=time.time() - t0,
    )
