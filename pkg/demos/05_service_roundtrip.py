"""Service round trip: train a tiny model, serve it in-process, and drive
the explorer endpoints exactly as the browser client does.
"""

import json
import threading
import urllib.request

import numpy as np

from uavgen import losses as ls
from uavgen import service as sv
from uavgen.decoders import default_decoders
from uavgen.training import TrainConfig, train

print("== tiny model ==")
result = train(
    TrainConfig(zeta_dim=2, batch=16, epochs=30, seed=0, alm=ls.ALMConfig(warmup_epochs=5))
)

snapshot = sv.ModelSnapshot(result.net, default_decoders())
server = sv.make_server(snapshot, port=0)
port = server.server_address[1]
threading.Thread(target=server.serve_forever, daemon=True).start()
base = f"http://127.0.0.1:{port}"
print(f"serving on {base}")


def post(path, body):
    req = urllib.request.Request(
        base + path, data=json.dumps(body).encode(), headers={"Content-Type": "application/json"}
    )
    with urllib.request.urlopen(req) as resp:
        return json.loads(resp.read())


with urllib.request.urlopen(base + "/api/info") as resp:
    info = json.loads(resp.read())
print("\n== /api/info ==")
print(json.dumps({k: info[k] for k in ("zeta_dim", "cases", "max_sweep_grid")}, indent=2))

print("\n== /api/generate at the latent origin ==")
gen = post("/api/generate", {"zeta": [0.0, 0.0], "case": "case1"})
print("metrics:", {k: round(v, 4) for k, v in gen["metrics"].items()})
print("feasible:", gen["feasible"], "| per-check:", gen["feasibility"])
print("mesh parts:", [p["name"] for p in gen["mesh"]["parts"]])

print("\n== /api/sweep 5x5 over (zeta1, zeta2) ==")
sweep = post("/api/sweep", {"axes": [0, 1], "grid": 5, "base_zeta": [0, 0], "case": "case1"})
grid = np.array([c["metrics"]["O_mass"] for c in sweep["cells"]]).reshape(5, 5)
feas = np.array([c["feasible"] for c in sweep["cells"]]).reshape(5, 5)
print("objective grid (rows = zeta1):")
for row, frow in zip(grid, feas):
    print("  " + "  ".join(f"{v:6.3f}{'*' if f else ' '}" for v, f in zip(row, frow)))
print("(* = feasible)")

cell = sweep["cells"][12]
point = post("/api/generate", {"zeta": cell["zeta"], "case": "case1", "mesh": False})
print("\ncenter cell equals the pointwise call:", cell["metrics"] == point["metrics"])
server.shutdown()
