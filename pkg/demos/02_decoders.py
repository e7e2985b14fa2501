"""Frozen stand-in decoders: containers, contracts, and smoothness.

Loads the shipped containers, verifies the wing's lift closure by direct
measurement, runs the internals cleanup on a colliding layout, and
contrasts the smooth and rough fuselage variants.
"""

import numpy as np

from uavgen import decoders as dc
from uavgen import tape as tp
from uavgen.cases import isa_density

decs = dc.default_decoders()

print("== wing decoder: demanded vs supplied lift ==")
rng = np.random.default_rng(3)
lo, hi = dc.WING_INPUT_RANGE
x = rng.uniform(lo, hi, size=(2000, 5))
out = decs.wing.forward_values(x)
rho = isa_density(x[:, 3])
lift = 0.5 * rho * x[:, 2] ** 2 * out[:, 2] * out[:, 0] * out[:, 1]
rel = np.abs(lift - x[:, 4]) / x[:, 4]
print(f"  relative lift error over 2000 samples: mean {rel.mean():.3%}, max {rel.max():.3%}")

print("\n== wing forward with airfoil conditions ==")
wf = dc.wing_forward(decs.wing, tp.Tensor([[0.3, -0.5]]), 22.0, 500.0, tp.Tensor([160.0]))
print(f"  chord {wf.chord.values[0]:.3f} m, span {wf.span.values[0]:.3f} m, "
      f"C_L {wf.cl_3d.values[0]:.3f}")
print(f"  Ma {wf.mach.values[0]:.3f}, Re {wf.reynolds.values[0]:.2e}, "
      f"alpha {np.rad2deg(wf.alpha.values[0]):.2f} deg, 64-point loop: {wf.airfoil.shape}")

print("\n== internals: exact target volumes, collision cleanup ==")
vols = np.array([0.02, 0.012, 0.008])
boxes = dc.internals_forward(decs.internals, tp.Tensor(np.zeros((1, 4))), vols)
print("  volumes:", np.round(boxes.volumes().values[0], 5), "targets:", vols)
from uavgen import boxes as bxm

overlap0 = bxm.box_overlap(boxes.centers, boxes.dims).values.max()
cleaned, converged = dc.internals_cleanup(boxes)
overlap1 = bxm.box_overlap(cleaned.centers, cleaned.dims).values.max()
print(f"  max pairwise overlap before {overlap0:.2e} m^3 -> after {overlap1:.2e} m^3 "
      f"(converged: {converged.all()})")

print("\n== smooth vs rough fuselage decoder ==")
smooth = dc.default_decoders(smooth_fuselage=True).fuselage
rough = dc.default_decoders(smooth_fuselage=False).fuselage
z = rng.uniform(-2, 2, size=(4000, 4))
dz = rng.normal(size=(4000, 4))
dz = 1e-4 * dz / np.linalg.norm(dz, axis=1, keepdims=True)
for name, dec in (("smooth", smooth), ("rough", rough)):
    delta = dec.forward_values(z + dz) - dec.forward_values(z)
    lip = np.abs(delta).max() / 1e-4
    print(f"  {name:<6} empirical Lipschitz estimate (max over outputs): {lip:8.2f}")

print("\n== containers are portable, versioned files ==")
container = dc.load_asset("fuselage", smooth=True)
print(f"  kind={container.kind}, layers={len(container.layers)}, "
      f"spectral_norm={container.spectral_norm}")
text = container.to_json()
round_trip = dc.WeightContainer.from_json(text)
print(f"  byte-exact round trip: {round_trip.to_json() == text}")
