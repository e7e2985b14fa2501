"""On-disk formats: checkpoints, design-exchange files, training logs.

All files are JSON; arrays are base64-encoded little-endian float64 with
explicit shapes, so files round-trip bit-exactly across platforms.
"""

from __future__ import annotations

import base64
import json

import numpy as np

from . import losses as ls
from .coordinator import CoordinatorNet, HypercubeSampler
from .training import TrainConfig, TrainResult
from .zspace import Z_DIM, Z_NAMES

CHECKPOINT_VERSION = 1
DESIGN_FILE_VERSION = 1


def _arr_to_doc(arr):
    arr = np.ascontiguousarray(arr, dtype="<f8")
    return {"shape": list(arr.shape), "data": base64.b64encode(arr.tobytes()).decode("ascii")}


def _doc_to_arr(doc):
    return np.frombuffer(base64.b64decode(doc["data"]), dtype="<f8").reshape(doc["shape"]).copy()


def save_checkpoint(path, result):
    """Persist a TrainResult: weights, config, dual state, counters."""
    doc = {
        "version": CHECKPOINT_VERSION,
        "config": result.config.to_dict(),
        "weights": {
            name: {"w": _arr_to_doc(entry["w"]), "b": _arr_to_doc(entry["b"])}
            for name, entry in result.net.state_dict().items()
        },
        "alm": {
            "v": _arr_to_doc(result.alm_state.v),
            "mu": _arr_to_doc(result.alm_state.mu),
            "lam": _arr_to_doc(result.alm_state.lam),
        },
        "sampler": {"dim": result.sampler.dim, "bins": result.sampler.bins},
        "final_epoch": len(result.log),
        "geometry_evals": result.log[-1].geometry_evals if result.log else 0,
    }
    with open(path, "w") as fh:
        json.dump(doc, fh, sort_keys=True)


def load_checkpoint(path):
    """Rebuild (net, config, alm_state, sampler) from a checkpoint file."""
    with open(path) as fh:
        doc = json.load(fh)
    if doc["version"] != CHECKPOINT_VERSION:
        raise ValueError(f"unsupported checkpoint version {doc['version']}")
    config = TrainConfig.from_dict(doc["config"])
    net = CoordinatorNet(config.zeta_dim, seed=config.seed, init_scheme=config.init_scheme)
    net.load_state_dict(
        {
            name: {"w": _doc_to_arr(entry["w"]), "b": _doc_to_arr(entry["b"])}
            for name, entry in doc["weights"].items()
        }
    )
    alm_state = ls.ALMState(
        v=_doc_to_arr(doc["alm"]["v"]),
        mu=_doc_to_arr(doc["alm"]["mu"]),
        lam=_doc_to_arr(doc["alm"]["lam"]),
        config=config.alm,
    )
    sampler = HypercubeSampler(dim=doc["sampler"]["dim"], bins=doc["sampler"]["bins"])
    return net, config, alm_state, sampler


def save_designs(path, z_batch, case_name, metrics=None, meta=None, design_space=None):
    """Design-exchange file: latent vectors with slot names plus metrics.

    `design_space` optionally carries the flat 324-column design-space
    encoding (fuselage, wings, internals, coupling — the aircraft-batch
    field order; see zspace.design_vector for the exact layout).
    """
    z_batch = np.asarray(z_batch, dtype=np.float64)
    if z_batch.ndim != 2 or z_batch.shape[1] != Z_DIM:
        raise ValueError(f"designs must be (N,{Z_DIM})")
    doc = {
        "version": DESIGN_FILE_VERSION,
        "case": case_name,
        "slot_names": Z_NAMES,
        "designs": _arr_to_doc(z_batch),
        "metrics": {k: _arr_to_doc(np.asarray(v)) for k, v in (metrics or {}).items()},
        "meta": meta or {},
    }
    if design_space is not None:
        design_space = np.asarray(design_space, dtype=np.float64)
        if design_space.shape != (z_batch.shape[0], 324):
            raise ValueError("design_space must be (N,324)")
        doc["design_space"] = _arr_to_doc(design_space)
    with open(path, "w") as fh:
        json.dump(doc, fh, sort_keys=True)


def load_designs(path):
    with open(path) as fh:
        doc = json.load(fh)
    if doc["version"] != DESIGN_FILE_VERSION:
        raise ValueError(f"unsupported design file version {doc['version']}")
    metrics = {k: _doc_to_arr(v) for k, v in doc.get("metrics", {}).items()}
    meta = doc.get("meta", {})
    if "design_space" in doc:
        meta = dict(meta)
        meta["design_space"] = _doc_to_arr(doc["design_space"])
    return _doc_to_arr(doc["designs"]), doc["case"], metrics, meta


def write_log(path, records):
    """Line-delimited JSON training log."""
    with open(path, "w") as fh:
        for rec in records:
            fh.write(json.dumps(rec.to_dict(), sort_keys=True) + "\n")


def read_log(path):
    with open(path) as fh:
        return [json.loads(line) for line in fh if line.strip()]
