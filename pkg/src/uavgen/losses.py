"""Constraint and diversity losses for coordinator training and baselines.

Adaptive augmented-Lagrangian dual updates come in two flavors: hypercube
(per-batch-element state, valid when element i always samples the same
latent cell) and pooled (state shared across the batch via the batch mean).
Both follow the same pipeline: smooth-cap the violations, track an EMA of
their squares, grow the penalties by a warmup-gated normalized increment,
then advance the multipliers.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import tape as tp


@dataclass
class ALMConfig:
    alpha: float = 0.9          # EMA factor for squared violations
    gamma: float = 5e-3         # penalty growth rate
    eps: float = 1e-8           # normalizer guard
    warmup_epochs: int = 200
    cap: float = 5.0            # smooth violation cap


@dataclass
class ALMState:
    """Dual variables for K constraints, shaped (1,K) pooled or (B,K) hypercube."""

    v: np.ndarray
    mu: np.ndarray
    lam: np.ndarray
    config: ALMConfig = field(default_factory=ALMConfig)

    @classmethod
    def zeros(cls, batch, k, config=None):
        shape = (batch, k)
        return cls(
            v=np.zeros(shape), mu=np.zeros(shape), lam=np.zeros(shape),
            config=config or ALMConfig(),
        )

    def snapshot(self):
        return {"v": self.v.copy(), "mu": self.mu.copy(), "lam": self.lam.copy()}


def _alm_core(c_vals, state, epoch):
    cfg = state.config
    capped = cfg.cap * np.tanh(c_vals / cfg.cap)
    state.v = cfg.alpha * state.v + (1.0 - cfg.alpha) * capped**2
    ramp = min(1.0, epoch / cfg.warmup_epochs) if cfg.warmup_epochs > 0 else 1.0
    delta = cfg.gamma * ramp * np.abs(capped) / (np.sqrt(state.v) + cfg.eps)
    state.mu = state.mu + np.maximum(0.0, delta)
    state.lam = state.lam + state.mu * capped
    return state.lam


def alm_update_hypercube(c_t, state, epoch):
    """Per-element dual update; c_t is (B,K) values or Tensor."""
    c_vals = c_t.values if isinstance(c_t, tp.Tensor) else np.asarray(c_t, float)
    if c_vals.shape != state.mu.shape:
        raise ValueError(f"violations {c_vals.shape} do not match state {state.mu.shape}")
    return _alm_core(c_vals, state, epoch)


def alm_update_pooled(c_t, state, epoch):
    """Batch-mean dual update; state is (1,K), broadcast over the batch."""
    c_vals = c_t.values if isinstance(c_t, tp.Tensor) else np.asarray(c_t, float)
    if state.mu.shape[0] != 1 or state.mu.shape[1] != c_vals.shape[1]:
        raise ValueError(f"pooled state must be (1,K); got {state.mu.shape}")
    pooled = c_vals.mean(axis=0, keepdims=True)
    return _alm_core(pooled, state, epoch)


def alm_penalty(lam, mu, c):
    """Classic augmented term sum_k (lam_k c_k + mu_k c_k^2 / 2)."""
    lam_t = lam if isinstance(lam, tp.Tensor) else tp.Tensor(np.asarray(lam, float))
    mu_t = mu if isinstance(mu, tp.Tensor) else tp.Tensor(np.asarray(mu, float))
    return tp.sum_(lam_t * c + mu_t * c * c * 0.5)


@dataclass
class DPPConfig:
    sigma: float = 1.0
    eps: float = 1e-2
    batch: int = 35
    repeats: int = 20


def _pairwise_sq_dists(x):
    sq = tp.sum_(x * x, axis=1)
    cross = tp.matmul(x, tp.swapaxes(x, 0, 1))
    d2 = tp.reshape(sq, (-1, 1)) + tp.reshape(sq, (1, -1)) - 2.0 * cross
    return tp.relu(d2)  # clamp the negative rounding noise on the diagonal


def dpp_loss(x, config=None):
    """Similarity-determinant diversity loss: -2 log|det(K + eps I)|.

    Higher values mean a more collapsed batch. Differentiable in x.
    """
    config = config or DPPConfig()
    if x.shape[0] < 2:
        raise ValueError("diversity needs at least two samples")
    if not np.all(np.isfinite(x.values)):
        raise ValueError("non-finite inputs to dpp_loss")
    d2 = _pairwise_sq_dists(x)
    k = tp.exp(d2 * (-1.0 / (2.0 * config.sigma**2)))
    l_mat = k + tp.Tensor(np.eye(x.shape[0]) * config.eps)
    _, logdet = tp.slogdet(l_mat)
    return -2.0 * logdet


def pa_dpp_loss(x, quality, config=None):
    """Performance-augmented variant: -log det(K (q q^T) + eps I)."""
    config = config or DPPConfig()
    if np.any(quality.values <= 0):
        raise ValueError("quality scores must be positive")
    d2 = _pairwise_sq_dists(x)
    k = tp.exp(d2 * (-1.0 / (2.0 * config.sigma**2)))
    q = tp.reshape(quality, (-1, 1))
    l_mat = k * tp.matmul(q, tp.swapaxes(q, 0, 1)) + tp.Tensor(np.eye(x.shape[0]) * config.eps)
    _, logdet = tp.slogdet(l_mat)
    return -1.0 * logdet


@dataclass
class EqualityActivation:
    mode: str = "relu"          # "relu" or "huber"
    tolerance: float = 0.0      # violation band treated as satisfied
    huber_width: float = 0.1    # quadratic-to-linear transition width

    def __post_init__(self):
        if self.mode not in ("relu", "huber"):
            raise ValueError(f"unknown equality activation '{self.mode}'")
        if self.tolerance < 0 or self.huber_width <= 0:
            raise ValueError("tolerance must be >= 0 and huber width > 0")


def equality_activation(c, act, tolerance=None):
    """Soften a non-negative violation magnitude into a penalty value.

    relu: max(0, c - tol). huber: quadratic r^2/(2w) inside the transition
    width, then linear r - w/2; continuous with continuous derivative at
    the band edge. `tolerance` may override the config with a per-sample
    constant array (e.g. span-fraction bands).
    """
    tol = act.tolerance if tolerance is None else tolerance
    tol = tol.values if isinstance(tol, tp.Tensor) else tol
    r = tp.relu(c - tol)
    if act.mode == "relu":
        return r
    w = act.huber_width
    quad = r * r * (0.5 / w)
    lin = r - 0.5 * w
    return tp.where(r.values <= w, quad, lin)
