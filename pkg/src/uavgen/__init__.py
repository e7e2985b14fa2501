"""Differentiable UAV geometry and latent-space design generation toolkit."""

from . import tape

__all__ = [
    "tape",
    "bezier",
    "fuselage",
    "wing",
    "boxes",
    "raycast",
    "aircraft",
    "containers",
    "decoders",
    "losses",
    "coordinator",
    "training",
    "optimizers",
    "evaluation",
    "zspace",
    "cases",
    "meshing",
    "fileio",
]
__version__ = "0.1.0"
