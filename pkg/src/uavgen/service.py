"""JSON-over-HTTP service backing the latent-space explorer.

Endpoints:
  GET  /api/info      model latent dimension, cases, tolerances, bounds
  POST /api/generate  {"zeta": [...], "case": "case1"} -> metrics + mesh
  POST /api/sweep     {"axes": [i] or [i,j], "grid": n<=21, "base_zeta": [...],
                       "case": ..., "meshes": false} -> grid of metrics

Requests are stateless over an immutable model snapshot; sweep cells are
computed through the same single-sample path as /api/generate, so a grid
equals the matching sequence of generate calls exactly.
"""

from __future__ import annotations

import json
import threading
from dataclasses import asdict
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

import numpy as np

from . import meshing, tape as tp, zspace as zs
from .aircraft import geometry_layer
from .cases import DEFAULT_CASES, get_case
from .decoders import default_decoders, internals_cleanup
from .evaluation import DEFAULT_TOLERANCES, feasibility_check
from .fileio import load_checkpoint

MAX_GRID = 21


class BadRequest(Exception):
    def __init__(self, message, status=400):
        super().__init__(message)
        self.status = status


class ModelSnapshot:
    """Immutable bundle the handlers read; swaps atomically on reload."""

    def __init__(self, net, decoder_set, cases=None):
        self.net = net
        self.decoder_set = decoder_set
        self.cases = cases or dict(DEFAULT_CASES)
        self.lock = threading.Lock()

    def info(self):
        return {
            "zeta_dim": self.net.zeta_dim,
            "zeta_range": [-1.0, 1.0],
            "cases": sorted(self.cases),
            "tolerances": asdict(DEFAULT_TOLERANCES),
            "metric_names": ["O_mass", "C_lift", "C_wx", "C_di", "C_bb", "C_boxpl"],
            "units": {
                "O_mass": "dimensionless (mass proxy / cargo mass)",
                "C_lift": "fraction of required lift",
                "C_wx": "fraction of fuselage length",
                "C_di": "radians",
                "C_bb": "fraction of interface height",
                "C_boxpl": "fraction of fuselage length",
            },
            "max_sweep_grid": MAX_GRID,
        }

    def generate(self, zeta, case_name, want_mesh=True, cleanup=False):
        if len(zeta) != self.net.zeta_dim:
            raise BadRequest(
                f"zeta must have {self.net.zeta_dim} entries, got {len(zeta)}", status=422
            )
        case = self.cases.get(case_name)
        if case is None:
            raise BadRequest(f"unknown case '{case_name}'")
        zeta_arr = np.asarray(zeta, dtype=np.float64)[None, :]
        with tp.no_grad():
            z, _ = self.net.forward(tp.Tensor(zeta_arr))
            craft = zs.build_aircraft(
                tp.Tensor(z.values), self.decoder_set, case, internals_cleanup=cleanup
            )
            report = geometry_layer(craft, case)
        feasible, checks = feasibility_check(report)
        metrics = {
            name: float(report.values[0, i])
            for i, name in enumerate(
                ["O_mass", "C_lift", "C_wx", "C_di", "C_bb", "C_boxpl"]
            )
        }
        out = {
            "metrics": metrics,
            "feasible": bool(feasible[0]),
            "feasibility": {k: bool(v[0]) for k, v in checks.items()},
            "latents": {
                "wing1": z.values[0, 0:2].tolist(),
                "wing2": z.values[0, 2:4].tolist(),
                "fuselage": z.values[0, 4:8].tolist(),
                "internals": z.values[0, 8:12].tolist(),
            },
            "z": z.values[0].tolist(),
        }
        if want_mesh:
            out["mesh"] = {"parts": meshing.mesh_to_payload(meshing.aircraft_mesh(craft, 0))}
        return out

    def sweep(self, axes, grid, base_zeta, case_name, want_meshes=False):
        if not isinstance(axes, list) or len(axes) not in (1, 2):
            raise BadRequest("axes must be a list of one or two indices")
        if any(not isinstance(a, int) or not 0 <= a < self.net.zeta_dim for a in axes):
            raise BadRequest("axes out of range", status=422)
        if not isinstance(grid, int) or not 2 <= grid <= MAX_GRID:
            raise BadRequest(f"grid must be an integer in [2, {MAX_GRID}]")
        base = list(base_zeta)
        if len(base) != self.net.zeta_dim:
            raise BadRequest(
                f"base_zeta must have {self.net.zeta_dim} entries", status=422
            )
        ticks = np.linspace(-1.0, 1.0, grid)
        cells = []
        shape = (grid,) if len(axes) == 1 else (grid, grid)
        for flat in range(int(np.prod(shape))):
            idx = np.unravel_index(flat, shape)
            zeta = list(base)
            for ax, t in zip(axes, idx):
                zeta[ax] = float(ticks[t])
            cell = self.generate(zeta, case_name, want_mesh=want_meshes, cleanup=False)
            record = {
                "zeta": zeta,
                "metrics": cell["metrics"],
                "feasible": cell["feasible"],
            }
            if want_meshes:
                record["mesh"] = cell["mesh"]
            cells.append(record)
        return {"axes": axes, "grid": grid, "ticks": ticks.tolist(), "cells": cells,
                "order": "row-major"}


class _Handler(BaseHTTPRequestHandler):
    snapshot = None

    def log_message(self, *args):
        pass

    def _send(self, status, payload):
        body = json.dumps(payload).encode()
        self.send_response(status)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(body)))
        self.send_header("Access-Control-Allow-Origin", "*")
        self.send_header("Access-Control-Allow-Headers", "Content-Type")
        self.end_headers()
        self.wfile.write(body)

    def do_OPTIONS(self):
        self._send(200, {})

    def do_GET(self):
        if self.path == "/api/info":
            self._send(200, self.snapshot.info())
        else:
            self._send(404, {"error": f"unknown path {self.path}"})

    def do_POST(self):
        try:
            length = int(self.headers.get("Content-Length", 0))
            try:
                body = json.loads(self.rfile.read(length) or b"{}")
            except json.JSONDecodeError as exc:
                raise BadRequest(f"invalid JSON body: {exc}") from exc
            if not isinstance(body, dict):
                raise BadRequest("body must be a JSON object")
            if self.path == "/api/generate":
                if "zeta" not in body:
                    raise BadRequest("missing field 'zeta'")
                out = self.snapshot.generate(
                    body["zeta"],
                    body.get("case", "case1"),
                    want_mesh=body.get("mesh", True),
                    cleanup=body.get("cleanup", False),
                )
                self._send(200, out)
            elif self.path == "/api/sweep":
                for fieldname in ("axes", "grid", "base_zeta"):
                    if fieldname not in body:
                        raise BadRequest(f"missing field '{fieldname}'")
                out = self.snapshot.sweep(
                    body["axes"],
                    body["grid"],
                    body["base_zeta"],
                    body.get("case", "case1"),
                    want_meshes=body.get("meshes", False),
                )
                self._send(200, out)
            else:
                self._send(404, {"error": f"unknown path {self.path}"})
        except BadRequest as exc:
            self._send(exc.status, {"error": str(exc)})
        except Exception as exc:  # noqa: BLE001 - report, don't crash the server
            self._send(500, {"error": f"{type(exc).__name__}: {exc}"})


def make_server(snapshot, port=0, host="127.0.0.1"):
    handler = type("BoundHandler", (_Handler,), {"snapshot": snapshot})
    return ThreadingHTTPServer((host, port), handler)


def serve_checkpoint(checkpoint_path, port=8787, host="127.0.0.1", smooth_fuselage=True):
    net, config, _, _ = load_checkpoint(checkpoint_path)
    snapshot = ModelSnapshot(net, default_decoders(smooth_fuselage=smooth_fuselage))
    server = make_server(snapshot, port=port, host=host)
    return server
