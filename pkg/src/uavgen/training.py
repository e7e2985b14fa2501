"""Data-free coordinator training.

Every epoch: sample the system latent batch (fixed hypercube cells),
run the coordinator and frozen decoders, score the batch in the geometry
layer, scalarize the adaptive-multiplier constraint terms with the
objective and optional diversity terms, backpropagate, step the main
optimizer (and the dedicated wing-placement optimizer when enabled),
then advance the dual variables.

When the inner optimizer is on, the wing placement heads read a detached
copy of the coordination features and their position/orientation losses
use detached interface anchors, so those equality gradients can never
reshape the main block or the fuselage.
"""

from __future__ import annotations

import time
from dataclasses import asdict, dataclass, field, replace

import numpy as np

from . import losses as ls
from . import tape as tp
from . import zspace as zs
from .aircraft import GEOMETRY_EVALS, geometry_layer
from .cases import get_case
from .coordinator import CoordinatorNet, HypercubeSampler
from .decoders import default_decoders
from .evaluation import DEFAULT_TOLERANCES, feasibility_check

CONSTRAINT_ORDER = ["lift", "wx", "di", "bb", "boxpl"]


@dataclass
class TrainConfig:
    zeta_dim: int = 4
    batch: int = 1296
    epochs: int = 600
    lr_main: float = 1e-3
    lr_inner: float = 2e-4
    cosine_decay: bool = True
    lambda_perf: float = 0.1
    lambda_mass: float = 1.0
    lambda_drag: float = 0.0
    lambda_dpp: float = 0.0
    lambda_dpp_latents: tuple = (0.0, 0.0, 0.0)  # wing, fuselage, internals
    lambda_mi: float = 0.0
    dpp_sigma: float = 1.0
    alm_scheme: str = "hypercube"  # or "pooled"
    alm: ls.ALMConfig = field(default_factory=lambda: ls.ALMConfig(warmup_epochs=60))
    equality_mode: str = "huber"  # or "relu"
    huber_width: float = 0.02
    tolerancing: bool = True
    # constant per-channel scaling for bringing violations to similar
    # magnitude when a case needs it (order: lift, wx, di, bb, boxpl)
    channel_scales: tuple = (1.0, 1.0, 1.0, 1.0, 1.0)
    inner_adam: bool = True
    inner_steps: int = 4  # placement-head steps per epoch (no geometry cost)
    init_scheme: str = "custom"
    seed: int = 0
    case: str = "case1"
    smooth_fuselage: bool = True
    feasibility_target: float = 0.7
    log_every: int = 1

    def __post_init__(self):
        if self.alm_scheme not in ("hypercube", "pooled"):
            raise ValueError(f"unknown ALM scheme '{self.alm_scheme}'")
        for name in ("lambda_perf", "lambda_mass", "lambda_drag", "lambda_dpp", "lambda_mi"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be non-negative")

    def to_dict(self):
        d = asdict(self)
        d["alm"] = asdict(self.alm)
        d["lambda_dpp_latents"] = list(self.lambda_dpp_latents)
        d["channel_scales"] = list(self.channel_scales)
        return d

    @classmethod
    def from_dict(cls, d):
        d = dict(d)
        if "alm" in d and isinstance(d["alm"], dict):
            d["alm"] = ls.ALMConfig(**d["alm"])
        for name in ("lambda_dpp_latents", "channel_scales"):
            if name in d:
                d[name] = tuple(d[name])
        return cls(**d)


def constraint_channels(report, case, config):
    """The five non-negative training violations, normalized.

    Equality channels pass through tolerance bands (when enabled) and the
    configured activation; the two inequality channels are already hinge
    violations. Order: lift, wx, di, bb, boxpl.
    """
    act = ls.EqualityActivation(
        mode=config.equality_mode, tolerance=0.0, huber_width=config.huber_width
    )
    tol = DEFAULT_TOLERANCES
    raw = report.raw
    wx1, wx2 = raw["wx_m"]
    di1, di2 = raw["di_rad"]
    b1, b2 = raw["spans_m"]
    l_req = raw["lift_required_n"]
    l1, l2 = raw["lift_supplied_n"]
    length = report.raw["fuselage_length_m"]

    if config.tolerancing:
        wx_tol1 = tol.wx_span_fraction * b1.values
        wx_tol2 = tol.wx_span_fraction * b2.values
        di_tol1 = np.deg2rad(tol.dihedral_front_deg)
        di_tol2 = np.deg2rad(tol.dihedral_rear_deg)
        lift_tol = tol.lift_fraction * l_req.values
    else:
        wx_tol1 = wx_tol2 = di_tol1 = di_tol2 = lift_tol = 0.0

    wx = (
        ls.equality_activation(wx1, act, tolerance=wx_tol1)
        + ls.equality_activation(wx2, act, tolerance=wx_tol2)
    ) / length
    di = ls.equality_activation(di1, act, tolerance=di_tol1) + ls.equality_activation(
        di2, act, tolerance=di_tol2
    )
    lift_resid = tp.absolute(l_req - (l1 + l2))
    lift = ls.equality_activation(lift_resid, act, tolerance=lift_tol) / l_req
    bb = report.column("C_bb")
    boxpl = report.column("C_boxpl")
    s = config.channel_scales
    return {
        "lift": lift * s[0],
        "wx": wx * s[1],
        "di": di * s[2],
        "bb": bb * s[3],
        "boxpl": boxpl * s[4],
    }


class QNetwork:
    """Auxiliary predictor reconstructing zeta from the design vector."""

    def __init__(self, zeta_dim, design_dim=324, seed=0):
        rng = np.random.default_rng(seed + 777)
        dims = [design_dim, 64, 64, zeta_dim]
        self.ws = [
            tp.Tensor(rng.normal(0, 1.0 / np.sqrt(dims[i]), size=(dims[i], dims[i + 1])),
                      requires_grad=True)
            for i in range(3)
        ]
        self.bs = [tp.Tensor(np.zeros(dims[i + 1]), requires_grad=True) for i in range(3)]
        self.opt = tp.AdamState(self.ws + self.bs, lr=1e-3)

    def predict(self, x):
        h = x
        for i in range(3):
            h = tp.matmul(h, self.ws[i]) + self.bs[i]
            if i < 2:
                h = tp.relu(h)
        return h


def mi_loss(zeta, design, q_net, design_scale):
    pred = q_net.predict(design * (1.0 / design_scale))
    return tp.mean((pred - zeta) ** 2.0)


def _design_scale(decoder_set, case, seed=0):
    """Fixed per-column normalization for diversity/MI terms on designs."""
    rng = np.random.default_rng(seed + 4242)
    z = zs.sample_uniform(rng, 64)
    with tp.no_grad():
        craft = zs.build_aircraft(tp.Tensor(z), decoder_set, case)
        x = zs.design_vector(craft).values
    scale = x.std(axis=0)
    return np.where(scale > 1e-9, scale, 1.0)


@dataclass
class EpochRecord:
    epoch: int
    loss: float
    objective: float
    channel_means: dict
    feasible_fraction: float
    mu_norm: float
    lam_norm: float
    geometry_evals: int
    flops: int
    wall: float

    def to_dict(self):
        return asdict(self)


@dataclass
class TrainResult:
    net: CoordinatorNet
    alm_state: ls.ALMState
    sampler: HypercubeSampler
    config: TrainConfig
    log: list
    q_net: object = None

    def evals_to_feasibility(self, target=None):
        """Geometry evaluations consumed when train-batch feasibility first
        reached the target; None if it never did."""
        target = target if target is not None else self.config.feasibility_target
        for rec in self.log:
            if rec.feasible_fraction >= target:
                return rec.geometry_evals
        return None


def train(config, decoder_set=None, progress=None):
    """Run data-free coordinator training; returns a TrainResult."""
    case = get_case(config.case)
    if decoder_set is None:
        decoder_set = default_decoders(smooth_fuselage=config.smooth_fuselage)
    net = CoordinatorNet(
        zeta_dim=config.zeta_dim, seed=config.seed, init_scheme=config.init_scheme
    )
    sampler = HypercubeSampler.for_batch(config.zeta_dim, config.batch)
    alm_batch = config.batch if config.alm_scheme == "hypercube" else 1
    alm_state = ls.ALMState.zeros(alm_batch, len(CONSTRAINT_ORDER), replace(config.alm))

    main_opt = tp.AdamState(net.main_parameters(), lr=config.lr_main)
    inner_opt = tp.AdamState(net.placement_parameters(), lr=config.lr_inner)
    if not config.inner_adam:
        main_opt = tp.AdamState(net.parameters(), lr=config.lr_main)

    q_net = QNetwork(config.zeta_dim, seed=config.seed) if config.lambda_mi > 0 else None
    need_designs = config.lambda_dpp > 0 or config.lambda_mi > 0
    design_scale = _design_scale(decoder_set, case, config.seed) if need_designs else None

    rng = np.random.default_rng(config.seed)
    dpp_cfg = ls.DPPConfig(sigma=config.dpp_sigma)
    log = []
    start_evals = GEOMETRY_EVALS.count
    t_start = time.time()

    for epoch in range(config.epochs):
        decay = (
            0.5 * (1.0 + np.cos(np.pi * epoch / config.epochs))
            if config.cosine_decay
            else 1.0
        )
        zeta_vals = sampler.sample(rng)
        zeta = tp.Tensor(zeta_vals)
        lam = alm_state.lam if config.alm_scheme == "hypercube" else np.repeat(
            alm_state.lam, config.batch, axis=0
        )

        if not config.inner_adam:
            placement_mode = "live"
        elif need_designs:
            placement_mode = "detached"
        else:
            placement_mode = "frozen"
        with tp.Tape() as tape:
            z, cf = net.forward(zeta, placement_mode=placement_mode)
            craft = zs.build_aircraft(z, decoder_set, case)
            report = geometry_layer(craft, case)
            channels = constraint_channels(report, case, config)

            objective = tp.mean(report.column("O_mass"))
            loss = config.lambda_perf * config.lambda_mass * objective
            active = CONSTRAINT_ORDER if not config.inner_adam else ["lift", "bb", "boxpl"]
            for k in active:
                col = CONSTRAINT_ORDER.index(k)
                loss = loss + tp.mean(tp.Tensor(lam[:, col]) * channels[k])
            if config.lambda_dpp > 0 or config.lambda_mi > 0:
                design = zs.design_vector(craft)
                if config.lambda_dpp > 0:
                    loss = loss + config.lambda_dpp * ls.dpp_loss(
                        design * (1.0 / design_scale), dpp_cfg
                    )
            lz = config.lambda_dpp_latents
            if lz[0] > 0:
                loss = loss + lz[0] * ls.dpp_loss(z[:, 0:4], dpp_cfg)
            if lz[1] > 0:
                loss = loss + lz[1] * ls.dpp_loss(z[:, 4:8], dpp_cfg)
            if lz[2] > 0:
                loss = loss + lz[2] * ls.dpp_loss(z[:, 8:12], dpp_cfg)
            if config.lambda_mi > 0:
                loss = loss + config.lambda_mi * mi_loss(zeta, design, q_net, design_scale)
            if not np.isfinite(loss.values):
                raise FloatingPointError(f"non-finite training loss at epoch {epoch}")
            tape.backward(loss)
        flops = tape.flops
        main_opt.step(lr=config.lr_main * decay)
        main_opt.zero_grad()
        if q_net is not None:
            q_net.opt.step()
            q_net.opt.zero_grad()

        if config.inner_adam and (lam[:, 1].any() or lam[:, 2].any()):
            # discard any placement gradients spilled by diversity terms in
            # the main pass; the dedicated optimizer sees only wx/di
            inner_opt.zero_grad()
            anchors = craft.fuselage.wingbase_xyz().values
            iface_di = craft.fuselage.interface_dihedral().values
            spans = (report.raw["spans_m"][0].values, report.raw["spans_m"][1].values)
            length = report.raw["fuselage_length_m"].values
            act = ls.EqualityActivation(
                mode=config.equality_mode, tolerance=0.0, huber_width=config.huber_width
            )
            if config.tolerancing:
                wx_t1 = DEFAULT_TOLERANCES.wx_span_fraction * spans[0]
                wx_t2 = DEFAULT_TOLERANCES.wx_span_fraction * spans[1]
                di_t1 = np.deg2rad(DEFAULT_TOLERANCES.dihedral_front_deg)
                di_t2 = np.deg2rad(DEFAULT_TOLERANCES.dihedral_rear_deg)
            else:
                wx_t1 = wx_t2 = di_t1 = di_t2 = 0.0
            cf_const = tp.Tensor(cf.values.copy())
            lam_wx = tp.Tensor(lam[:, 1])
            lam_di = tp.Tensor(lam[:, 2])
            # wx/di against frozen anchors are closed-form, so extra inner
            # iterations sharpen wing placement without geometry passes
            for _ in range(max(1, config.inner_steps)):
                with tp.Tape() as inner_tape:
                    placements = net.placement_outputs(cf_const)
                    w1p = placements[(14, 15)]
                    w2p = placements[(16, 17, 18, 19)]
                    wx1 = tp.absolute(w1p[:, 0] - anchors[:, 0, 1])
                    wx2 = tp.norm(w2p[:, 0:3] - anchors[:, 1, :], axis=-1)
                    di1 = tp.absolute(w1p[:, 1] - iface_di[:, 0])
                    di2 = tp.absolute(w2p[:, 3] - iface_di[:, 1])
                    wx_pen = (
                        ls.equality_activation(wx1, act, tolerance=wx_t1)
                        + ls.equality_activation(wx2, act, tolerance=wx_t2)
                    ) / tp.Tensor(length)
                    di_pen = ls.equality_activation(di1, act, tolerance=di_t1) + (
                        ls.equality_activation(di2, act, tolerance=di_t2)
                    )
                    inner = tp.mean(lam_wx * wx_pen) + tp.mean(lam_di * di_pen)
                    inner_tape.backward(inner)
                flops += inner_tape.flops
                inner_opt.step(lr=config.lr_inner * decay)
                inner_opt.zero_grad()

        channel_vals = np.stack(
            [channels[k].values for k in CONSTRAINT_ORDER], axis=-1
        )
        if config.alm_scheme == "hypercube":
            ls.alm_update_hypercube(channel_vals, alm_state, epoch)
        else:
            ls.alm_update_pooled(channel_vals, alm_state, epoch)

        feasible, _ = feasibility_check(report)
        record = EpochRecord(
            epoch=epoch,
            loss=float(loss.values),
            objective=float(objective.values),
            channel_means={k: float(channels[k].values.mean()) for k in CONSTRAINT_ORDER},
            feasible_fraction=float(feasible.mean()),
            mu_norm=float(np.linalg.norm(alm_state.mu)),
            lam_norm=float(np.linalg.norm(alm_state.lam)),
            geometry_evals=GEOMETRY_EVALS.count - start_evals,
            flops=int(flops),
            wall=time.time() - t_start,
        )
        log.append(record)
        if progress is not None and epoch % config.log_every == 0:
            progress(record)

    return TrainResult(
        net=net, alm_state=alm_state, sampler=sampler, config=config, log=log, q_net=q_net
    )
