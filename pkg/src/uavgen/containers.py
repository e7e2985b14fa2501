"""Portable weight containers and frozen decoder inference.

Format (version 1): JSON with base64-encoded little-endian float64 arrays.

    {
      "format_version": 1,
      "kind": "wing" | "fuselage" | "internals",
      "latent_dim": int, "condition_dim": int,
      "spectral_norm": bool,
      "layers": [
        {"in_dim": int, "out_dim": int,
         "weights": b64(f64le, row-major out_dim x in_dim),
         "bias": b64(f64le, out_dim),
         "activation": "relu" | "tanh" | "sigmoid" | "linear"},
        ...
      ],
      "input_range":  {"min": [...], "max": [...]},
      "output_range": {"min": [...], "max": [...]},
      "metadata": {...}
    }

Inputs are affinely mapped from their declared ranges to [-1, 1] before the
layers; a bounded final activation (tanh or sigmoid) is affinely mapped back
to the output ranges, so outputs stay inside their declared ranges for any
finite input. Loaded decoders evaluate on the tape with constant weights.
"""

from __future__ import annotations

import base64
import json
from dataclasses import dataclass, field

import numpy as np

from . import tape as tp

FORMAT_VERSION = 1
ACTIVATIONS = ("relu", "tanh", "sigmoid", "linear")


def _encode(arr):
    return base64.b64encode(np.ascontiguousarray(arr, dtype="<f8").tobytes()).decode("ascii")


def _decode(text, shape):
    arr = np.frombuffer(base64.b64decode(text), dtype="<f8").reshape(shape)
    return arr.astype(np.float64)


@dataclass
class Layer:
    weights: np.ndarray  # (out_dim, in_dim)
    bias: np.ndarray     # (out_dim,)
    activation: str

    def __post_init__(self):
        if self.activation not in ACTIVATIONS:
            raise ValueError(f"unknown activation '{self.activation}'")


@dataclass
class WeightContainer:
    kind: str
    layers: list
    input_range: np.ndarray   # (2, d_in) rows min/max
    output_range: np.ndarray  # (2, d_out)
    latent_dim: int
    condition_dim: int
    spectral_norm: bool
    metadata: dict = field(default_factory=dict)
    format_version: int = FORMAT_VERSION

    def validate(self):
        if self.format_version != FORMAT_VERSION:
            raise ValueError(f"unsupported format_version {self.format_version}")
        d_in = self.input_range.shape[1]
        for i, layer in enumerate(self.layers):
            if layer.weights.shape[1] != d_in:
                raise ValueError(
                    f"layer {i}: in_dim {layer.weights.shape[1]} does not chain ({d_in} expected)"
                )
            if layer.weights.shape[0] != layer.bias.shape[0]:
                raise ValueError(f"layer {i}: bias length mismatch")
            d_in = layer.weights.shape[0]
        if d_in != self.output_range.shape[1]:
            raise ValueError("output_range width does not match final layer")
        if np.any(self.input_range[0] >= self.input_range[1]) or np.any(
            self.output_range[0] >= self.output_range[1]
        ):
            raise ValueError("denormalization ranges need min < max")
        if self.layers[-1].activation not in ("tanh", "sigmoid"):
            raise ValueError("final activation must be bounded (tanh or sigmoid)")

    def to_json(self):
        doc = {
            "format_version": self.format_version,
            "kind": self.kind,
            "latent_dim": self.latent_dim,
            "condition_dim": self.condition_dim,
            "spectral_norm": self.spectral_norm,
            "layers": [
                {
                    "in_dim": int(l.weights.shape[1]),
                    "out_dim": int(l.weights.shape[0]),
                    "weights": _encode(l.weights),
                    "bias": _encode(l.bias),
                    "activation": l.activation,
                }
                for l in self.layers
            ],
            "input_range": {
                "min": self.input_range[0].tolist(),
                "max": self.input_range[1].tolist(),
            },
            "output_range": {
                "min": self.output_range[0].tolist(),
                "max": self.output_range[1].tolist(),
            },
            "metadata": self.metadata,
        }
        return json.dumps(doc, sort_keys=True, separators=(",", ":"))

    def save(self, path):
        with open(path, "w") as fh:
            fh.write(self.to_json())

    @classmethod
    def from_json(cls, text):
        doc = json.loads(text)
        layers = [
            Layer(
                weights=_decode(l["weights"], (l["out_dim"], l["in_dim"])),
                bias=_decode(l["bias"], (l["out_dim"],)),
                activation=l["activation"],
            )
            for l in doc["layers"]
        ]
        return cls(
            kind=doc["kind"],
            layers=layers,
            input_range=np.array([doc["input_range"]["min"], doc["input_range"]["max"]]),
            output_range=np.array([doc["output_range"]["min"], doc["output_range"]["max"]]),
            latent_dim=doc["latent_dim"],
            condition_dim=doc["condition_dim"],
            spectral_norm=doc["spectral_norm"],
            metadata=doc.get("metadata", {}),
            format_version=doc["format_version"],
        )

    @classmethod
    def load(cls, path):
        with open(path) as fh:
            return cls.from_json(fh.read())


_ACT_FNS = {
    "relu": tp.relu,
    "tanh": tp.tanh,
    "sigmoid": tp.sigmoid,
    "linear": lambda x: x,
}


class FrozenDecoder:
    """Inference-only MLP over the tape; parameters are constants."""

    def __init__(self, container):
        container.validate()
        self.container = container
        self._weights = [tp.Tensor(l.weights.T.copy()) for l in container.layers]
        self._biases = [tp.Tensor(l.bias.copy()) for l in container.layers]

    @property
    def kind(self):
        return self.container.kind

    @property
    def input_range(self):
        return self.container.input_range

    @property
    def output_range(self):
        return self.container.output_range

    def forward(self, x):
        """(B, d_in) physical inputs -> (B, d_out) physical outputs."""
        lo, hi = self.container.input_range
        h = (x - lo) * (2.0 / (hi - lo)) - 1.0
        for w, b, layer in zip(self._weights, self._biases, self.container.layers):
            h = tp.matmul(h, w) + b
            h = _ACT_FNS[layer.activation](h)
        olo, ohi = self.container.output_range
        if self.container.layers[-1].activation == "tanh":
            unit = (h + 1.0) * 0.5
        else:  # sigmoid
            unit = h
        return unit * (ohi - olo) + olo

    def forward_values(self, x_vals):
        with tp.no_grad():
            return self.forward(tp.Tensor(np.asarray(x_vals, dtype=np.float64))).values


def spectral_normalize(weights, iters=50, seed=0):
    """Top singular value via power iteration; returns (sigma, normalized)."""
    if iters < 1:
        raise ValueError("need at least one power iteration")
    w = np.asarray(weights, dtype=np.float64)
    if not np.any(w):
        raise ValueError("zero matrix has no spectral direction")
    rng = np.random.default_rng(seed)
    v = rng.normal(size=w.shape[1])
    v /= np.linalg.norm(v)
    for _ in range(iters):
        u = w @ v
        u /= max(np.linalg.norm(u), 1e-300)
        v = w.T @ u
        v /= max(np.linalg.norm(v), 1e-300)
    sigma = float(u @ w @ v)
    return sigma, w / sigma
