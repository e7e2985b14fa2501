"""Coordinator network: system latent -> full 22-slot design latent.

A shared main block (5-layer MLP, width 64) produces a coordination
feature vector. Per-subsystem heads consume it:

  fuselage / wing latent+condition heads: one linear layer with tanh
  (latents) and sigmoid (conditions) outputs, then per-slot denorm.
  internals latent and placement heads: deeper ReLU MLPs with one skip.
  wing placement heads: stacks of four wide residual blocks
  (256 -> 512 -> 256 with a full-block skip), feeding bounded outputs.

The custom initialization keys on the following activation: Kaiming
uniform (bound sqrt(6/fan_in)) before ReLU, high-variance normals
(sigma^2 = 4/fan_in) before tanh/sigmoid, zero biases. Skip projections
use the conventional uniform fallback. `init_scheme="default"` applies
the conventional uniform init everywhere instead.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import tape as tp
from .zspace import Z_BOUNDS, Z_DIM

CF_DIM = 64
WRB_WIDTH = 256
WRB_HIDDEN = 512
N_WRB = 4

# slot groups produced by each head
SLOTS_W1_LC = [0, 1, 12]      # wing-1 latent + lift condition
SLOTS_W2_LC = [2, 3, 13]
SLOTS_FUSELAGE = [4, 5, 6, 7]
SLOTS_INTERNALS = [8, 9, 10, 11]
SLOTS_W1_PLACE = [14, 15]
SLOTS_W2_PLACE = [16, 17, 18, 19]
SLOTS_INT_PLACE = [20, 21]

PLACEMENT_SLOTS = SLOTS_W1_PLACE + SLOTS_W2_PLACE


class Linear:
    def __init__(self, name, n_in, n_out, next_act, standalone=False):
        self.name = name
        self.n_in = n_in
        self.n_out = n_out
        self.next_act = next_act
        self.standalone = standalone
        self.w = tp.Tensor(np.zeros((n_in, n_out)), requires_grad=True)
        self.b = tp.Tensor(np.zeros(n_out), requires_grad=True)

    def init(self, rng, scheme):
        if scheme == "default" or self.standalone:
            bound = 1.0 / np.sqrt(self.n_in)
            self.w.values = rng.uniform(-bound, bound, size=(self.n_in, self.n_out))
            self.b.values = (
                rng.uniform(-bound, bound, size=self.n_out)
                if scheme == "default"
                else np.zeros(self.n_out)
            )
            return
        if self.next_act == "relu":
            a = np.sqrt(6.0 / self.n_in)
            self.w.values = rng.uniform(-a, a, size=(self.n_in, self.n_out))
        elif self.next_act in ("tanh", "sigmoid", "mixed"):
            self.w.values = rng.normal(0.0, np.sqrt(4.0 / self.n_in), size=(self.n_in, self.n_out))
        else:
            raise ValueError(f"no initialization rule for activation '{self.next_act}'")
        self.b.values = np.zeros(self.n_out)

    def __call__(self, x):
        return tp.matmul(x, self.w) + self.b

    def params(self):
        return [self.w, self.b]


class WideResidualBlock:
    """3-layer 256->512->256 MLP with a full-block skip connection."""

    # keeps four stacked residual branches from saturating the bounded
    # output layer at initialization (custom scheme only)
    RESIDUAL_DAMPING = 0.3

    def __init__(self, name):
        self.l1 = Linear(f"{name}.l1", WRB_WIDTH, WRB_HIDDEN, "relu")
        self.l2 = Linear(f"{name}.l2", WRB_HIDDEN, WRB_HIDDEN, "relu")
        self.l3 = Linear(f"{name}.l3", WRB_HIDDEN, WRB_WIDTH, "relu")

    def __call__(self, x):
        h = tp.relu(self.l1(x))
        h = tp.relu(self.l2(h))
        return tp.relu(x + self.l3(h))

    def layers(self):
        return [self.l1, self.l2, self.l3]

    def damp(self):
        self.l3.w.values *= self.RESIDUAL_DAMPING


def _denorm(unit01, slots):
    lo = Z_BOUNDS[slots, 0]
    hi = Z_BOUNDS[slots, 1]
    return unit01 * (hi - lo) + lo


def _bounded(raw, kinds):
    """Columnwise tanh/sigmoid squashing to [0,1] by kind list."""
    cols = []
    for j, kind in enumerate(kinds):
        col = raw[:, j]
        if kind == "tanh":
            cols.append((tp.tanh(col) + 1.0) * 0.5)
        else:
            cols.append(tp.sigmoid(col))
    return tp.stack(cols, axis=-1)


class CoordinatorNet:
    def __init__(self, zeta_dim=4, seed=0, init_scheme="custom"):
        if init_scheme not in ("custom", "default"):
            raise ValueError(f"unknown init scheme '{init_scheme}'")
        self.zeta_dim = zeta_dim
        self.seed = seed
        self.init_scheme = init_scheme

        self.main = [Linear(f"main.{i}", zeta_dim if i == 0 else CF_DIM, CF_DIM, "relu")
                     for i in range(5)]
        self.head_w1 = Linear("head_w1", CF_DIM, 3, "mixed")
        self.head_w2 = Linear("head_w2", CF_DIM, 3, "mixed")
        self.head_fus = Linear("head_fus", CF_DIM, 4, "tanh")
        self.int_latent = _DeepHead("int_latent", 4)
        self.int_place = _DeepHead("int_place", 2)
        self.w1_place = _PlacementHead("w1_place", 2)
        self.w2_place = _PlacementHead("w2_place", 4)

        rng = np.random.default_rng(seed)
        for layer in self._all_layers():
            layer.init(rng, init_scheme)
        if init_scheme == "custom":
            for head in (self.w1_place, self.w2_place):
                for block in head.blocks:
                    block.damp()

    def _all_layers(self):
        layers = list(self.main)
        layers += [self.head_w1, self.head_w2, self.head_fus]
        layers += self.int_latent.layers() + self.int_place.layers()
        layers += self.w1_place.layers() + self.w2_place.layers()
        return layers

    # -- parameter groups ---------------------------------------------------

    def parameters(self):
        return [p for layer in self._all_layers() for p in layer.params()]

    def placement_parameters(self):
        """Wing placement head parameters (the dedicated optimizer's set).

        The internals layout head stays with the main optimizer: its
        gradients come from the containment term, not from wx/di.
        """
        return [
            p
            for layer in self.w1_place.layers() + self.w2_place.layers()
            for p in layer.params()
        ]

    def main_parameters(self):
        placement = {id(p) for p in self.placement_parameters()}
        return [p for p in self.parameters() if id(p) not in placement]

    def parameter_count(self):
        return sum(p.values.size for p in self.parameters())

    def state_dict(self):
        return {
            layer.name: {"w": layer.w.values.copy(), "b": layer.b.values.copy()}
            for layer in self._all_layers()
        }

    def load_state_dict(self, state):
        for layer in self._all_layers():
            entry = state[layer.name]
            if layer.w.values.shape != entry["w"].shape:
                raise ValueError(f"shape mismatch for layer {layer.name}")
            layer.w.values = np.array(entry["w"], dtype=np.float64)
            layer.b.values = np.array(entry["b"], dtype=np.float64)

    def checksum(self, params=None):
        params = self.parameters() if params is None else params
        return float(sum(np.sum(p.values**2) for p in params))

    # -- forward passes -------------------------------------------------------

    def coordination_features(self, zeta):
        h = zeta
        for layer in self.main:
            h = tp.relu(layer(h))
        return h

    def latent_outputs(self, cf):
        """Slots 0..13 plus the internals layout offset (20, 21) from CF."""
        out = {}
        w1 = _bounded(self.head_w1(cf), ["tanh", "tanh", "sigmoid"])
        w2 = _bounded(self.head_w2(cf), ["tanh", "tanh", "sigmoid"])
        fus = _bounded(self.head_fus(cf), ["tanh"] * 4)
        intl = _bounded(self.int_latent(cf), ["tanh"] * 4)
        ip = _bounded(self.int_place(cf), ["tanh"] * 2)
        out[tuple(SLOTS_W1_LC)] = _denorm(w1, SLOTS_W1_LC)
        out[tuple(SLOTS_W2_LC)] = _denorm(w2, SLOTS_W2_LC)
        out[tuple(SLOTS_FUSELAGE)] = _denorm(fus, SLOTS_FUSELAGE)
        out[tuple(SLOTS_INTERNALS)] = _denorm(intl, SLOTS_INTERNALS)
        out[tuple(SLOTS_INT_PLACE)] = _denorm(ip, SLOTS_INT_PLACE)
        return out

    def placement_outputs(self, cf):
        """Wing placement slots 14..19 from CF."""
        out = {}
        w1p = _bounded(self.w1_place(cf), ["tanh"] * 2)
        w2p = _bounded(self.w2_place(cf), ["tanh"] * 4)
        out[tuple(SLOTS_W1_PLACE)] = _denorm(w1p, SLOTS_W1_PLACE)
        out[tuple(SLOTS_W2_PLACE)] = _denorm(w2p, SLOTS_W2_PLACE)
        return out

    def assemble_z(self, parts):
        """Merge slot-group outputs into the (B,22) design latent."""
        cols = [None] * Z_DIM
        for slots, tensor in parts.items():
            for j, slot in enumerate(slots):
                cols[slot] = tensor[:, j]
        return tp.stack(cols, axis=-1)

    def forward(self, zeta, placement_mode="live"):
        """Full forward: returns (z, cf).

        placement_mode:
          "live"     placement heads share the graph (default; evaluation).
          "detached" heads read a constant copy of CF: no placement
                     gradient can reach the main block, but placements stay
                     differentiable w.r.t. head parameters.
          "frozen"   placements enter as plain constants (cheapest; the
                     dedicated placement optimizer owns them elsewhere).
        """
        cf = self.coordination_features(zeta)
        parts = self.latent_outputs(cf)
        if placement_mode == "live":
            parts.update(self.placement_outputs(cf))
        elif placement_mode == "detached":
            parts.update(self.placement_outputs(tp.Tensor(cf.values.copy())))
        elif placement_mode == "frozen":
            with tp.no_grad():
                frozen = self.placement_outputs(tp.Tensor(cf.values.copy()))
            parts.update({k: tp.Tensor(v.values.copy()) for k, v in frozen.items()})
        else:
            raise ValueError(f"unknown placement mode '{placement_mode}'")
        return self.assemble_z(parts), cf


class _DeepHead:
    """Two ReLU layers with a linear skip from the head input."""

    def __init__(self, name, n_out):
        self.l1 = Linear(f"{name}.l1", CF_DIM, CF_DIM, "relu")
        self.l2 = Linear(f"{name}.l2", CF_DIM, CF_DIM, "relu")
        self.out = Linear(f"{name}.out", CF_DIM, n_out, "tanh")
        self.skip = Linear(f"{name}.skip", CF_DIM, n_out, "tanh", standalone=True)

    def __call__(self, x):
        h = tp.relu(self.l1(x))
        h = tp.relu(self.l2(h))
        return self.out(h) + self.skip(x)

    def layers(self):
        return [self.l1, self.l2, self.out, self.skip]


class _PlacementHead:
    def __init__(self, name, n_out):
        self.proj = Linear(f"{name}.proj", CF_DIM, WRB_WIDTH, "relu")
        self.blocks = [WideResidualBlock(f"{name}.wrb{i}") for i in range(N_WRB)]
        self.out = Linear(f"{name}.out", WRB_WIDTH, n_out, "tanh")

    def __call__(self, x):
        h = tp.relu(self.proj(x))
        for block in self.blocks:
            h = block(h)
        return self.out(h)

    def layers(self):
        out = [self.proj, self.out]
        for block in self.blocks:
            out.extend(block.layers())
        return out


@dataclass
class HypercubeSampler:
    """Fixed cell-per-batch-index sampling over the zeta box [-1, 1]^d."""

    dim: int
    bins: int

    def __post_init__(self):
        self.batch = self.bins**self.dim
        idx = np.arange(self.batch)
        self.cells = np.stack(np.unravel_index(idx, (self.bins,) * self.dim), axis=-1)

    @classmethod
    def for_batch(cls, dim, batch):
        bins = round(batch ** (1.0 / dim))
        if bins**dim != batch:
            raise ValueError(f"batch {batch} is not a perfect {dim}-th power")
        return cls(dim=dim, bins=bins)

    def cell_bounds(self):
        width = 2.0 / self.bins
        lo = -1.0 + self.cells * width
        return lo, lo + width

    def sample(self, rng):
        lo, hi = self.cell_bounds()
        return rng.uniform(lo, hi)


def sample_zeta_uniform(rng, n, dim):
    return rng.uniform(-1.0, 1.0, size=(n, dim))
