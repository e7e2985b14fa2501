"""The unified 22-dimensional latent layout and design instantiation.

Slot layout (project convention):

    0-1    front wing shape latent
    2-3    rear wing shape latent
    4-7    fuselage latent
    8-11   internals latent
    12,13  lift requirements for front/rear wing (N)
    14,15  front wing spanwise position y (m), front dihedral (rad)
    16-18  rear wing root position x, y, z (m)
    19     rear dihedral (rad)
    20,21  internals layout offset x, z (m)

The front wing's chordwise/vertical position rides on the front interface
anchor (the aircraft datum), so only its spanwise coordinate is free.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import decoders as dc
from . import tape as tp
from .aircraft import AircraftBatch, BoxSetBatch
from .cases import get_case
from .fuselage import build_fuselage
from .wing import WingBatch

Z_DIM = 22

Z_NAMES = [
    "wing1_z0", "wing1_z1", "wing2_z0", "wing2_z1",
    "fuselage_z0", "fuselage_z1", "fuselage_z2", "fuselage_z3",
    "internals_z0", "internals_z1", "internals_z2", "internals_z3",
    "lift_req_front", "lift_req_rear",
    "wing1_y", "wing1_dihedral",
    "wing2_x", "wing2_y", "wing2_z", "wing2_dihedral",
    "internals_x", "internals_z",
]

Z_BOUNDS = np.array(
    [
        [-2.0, 2.0], [-2.0, 2.0], [-2.0, 2.0], [-2.0, 2.0],
        [-2.0, 2.0], [-2.0, 2.0], [-2.0, 2.0], [-2.0, 2.0],
        [-2.0, 2.0], [-2.0, 2.0], [-2.0, 2.0], [-2.0, 2.0],
        [25.0, 350.0], [25.0, 350.0],
        [0.02, 0.75], [-0.6, 0.6],
        [0.5, 4.2], [0.02, 0.45], [-0.15, 0.6], [-0.6, 0.6],
        [-0.3, 2.0], [-0.5, 0.5],
    ]
)

# outer (shape + internals placement) / inner (wing placement + lifts)
# variable split used by the two-level baseline optimizer
OUTER_IDX = np.array([0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 20, 21])
INNER_IDX = np.array([12, 13, 14, 15, 16, 17, 18, 19])

IGD_RESET_VALUES = {
    12: 150.0, 13: 40.0,
    14: 0.3, 15: 0.0,
    16: 1.8, 17: 0.15, 18: 0.1, 19: 0.0,
}


def clamp_to_bounds(z_vals):
    return np.clip(z_vals, Z_BOUNDS[:, 0], Z_BOUNDS[:, 1])


def sample_uniform(rng, n):
    return rng.uniform(Z_BOUNDS[:, 0], Z_BOUNDS[:, 1], size=(n, Z_DIM))


def build_aircraft(z, decoder_set, case, internals_cleanup=False):
    """Instantiate a (B,22) latent batch into a full AircraftBatch."""
    case = get_case(case)
    if z.shape[-1] != Z_DIM:
        raise ValueError(f"latent batch must have {Z_DIM} columns, got {z.shape}")

    wf1 = dc.wing_forward(decoder_set.wing, z[:, 0:2], case.velocity, case.altitude, z[:, 12])
    wf2 = dc.wing_forward(decoder_set.wing, z[:, 2:4], case.velocity, case.altitude, z[:, 13])
    x_f = dc.fuselage_forward(decoder_set.fuselage, z[:, 4:8])
    fus = build_fuselage(x_f)

    boxes = dc.internals_forward(decoder_set.internals, z[:, 8:12], np.asarray(case.box_volumes))
    if internals_cleanup:
        boxes, _ = dc.internals_cleanup(boxes)
    offset = tp.stack([z[:, 20], z[:, 20] * 0.0, z[:, 21]], axis=-1)
    boxes = BoxSetBatch(
        centers=boxes.centers + tp.reshape(offset, (-1, 1, 3)),
        dims=boxes.dims,
        target_volumes=boxes.target_volumes,
    )

    anchors = fus.wingbase_xyz()
    root1 = tp.stack([anchors[:, 0, 0], z[:, 14], anchors[:, 0, 2]], axis=-1)
    root2 = z[:, 16:19]

    def wing_batch(wf, root, dihedral):
        return WingBatch(
            airfoil=wf.airfoil, alpha=wf.alpha, span=wf.span, chord=wf.chord,
            cl_3d=wf.cl_3d, mach=wf.mach, reynolds=wf.reynolds,
            cl_section=wf.cl_section, root=root, dihedral=dihedral,
        )

    w1 = wing_batch(wf1, root1, z[:, 15])
    w2 = wing_batch(wf2, root2, z[:, 19])
    return AircraftBatch(
        fuselage=fus, wings=(w1, w2), internals=boxes, lift_requirements=z[:, 12:14]
    )


def design_vector(aircraft):
    """Canonical flat design-space encoding, 324 columns per element.

    Layout: fuselage 15; per wing 128 airfoil coords + 14 scalars
    (alpha, span, chord, C_L, Ma, Re, C_l, dihedral, root xyz, sweep,
    taper, twist; the last three are fixed by this parametrization);
    internals 3 x (l, w, h, x, y, z); then lift requirements, target
    volumes, and the layout offset recovered from the anchored first box.
    """
    fus = aircraft.fuselage
    b = aircraft.batch
    parts = [fus.params]
    for w in aircraft.wings:
        zeros = w.span * 0.0
        parts.append(tp.reshape(w.airfoil, (b, 128)))
        parts.append(
            tp.stack(
                [
                    w.alpha, w.span, w.chord, w.cl_3d, w.mach, w.reynolds, w.cl_section,
                    w.dihedral, w.root[:, 0], w.root[:, 1], w.root[:, 2],
                    zeros, zeros + 1.0, zeros,
                ],
                axis=-1,
            )
        )
    boxes = aircraft.internals
    parts.append(
        tp.reshape(tp.concat([boxes.dims, boxes.centers], axis=2), (b, 18))
    )
    anchor = boxes.centers[:, 0, :]
    parts.append(
        tp.concat(
            [
                aircraft.lift_requirements,
                tp.Tensor(boxes.target_volumes),
                tp.stack([anchor[:, 0], anchor[:, 2]], axis=-1),
            ],
            axis=1,
        )
    )
    out = tp.concat(parts, axis=1)
    assert out.shape[1] == 324
    return out
