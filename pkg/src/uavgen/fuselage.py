"""Constructive fuselage geometry from 15 parameters.

Parameter vector x_F per batch element (lengths in meters):

    [L1, w1, hr1, hf1, s1,   front primary segment
     L2, w2, hr2, hf2, s2,   rear primary segment
     Lb, zt,                 bridge length, rear vertical offset
     Ln, q,                  nose length, nose bluntness (0 pointy .. 1 blunt)
     k]                      global scale applied to all lengths

Each primary segment extrudes a closed half cross-section along x: a roof
cubic from the top centerline to the upper edge of a planar vertical face
of height s at half-width w (the wing interface), and a floor cubic back
to the bottom centerline. Roof and floor meet the face with vertical
tangents, so the section is C1 there. The bridge and nose each consist of
three bicubic patches (roof/face/floor) whose x control values are equally
spaced, keeping x linear in the patch parameter u.

Everything here is tape-differentiable in x_F.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import bezier as bz
from . import tape as tp

SHAPE_COEF = 0.55  # tangent-length fraction for the section cubics

FUSELAGE_PARAM_NAMES = [
    "front_length", "front_halfwidth", "front_roof_rise", "front_floor_drop", "front_face_height",
    "rear_length", "rear_halfwidth", "rear_roof_rise", "rear_floor_drop", "rear_face_height",
    "bridge_length", "tail_z_offset",
    "nose_length", "nose_bluntness",
    "global_scale",
]

# denormalization ranges for decoder-produced fuselage parameters (meters)
FUSELAGE_PARAM_RANGES = np.array(
    [
        [0.5, 1.4],    # front_length
        [0.12, 0.38],  # front_halfwidth
        [0.08, 0.32],  # front_roof_rise
        [0.08, 0.32],  # front_floor_drop
        [0.08, 0.30],  # front_face_height
        [0.3, 0.9],    # rear_length
        [0.06, 0.22],  # rear_halfwidth
        [0.05, 0.2],   # rear_roof_rise
        [0.05, 0.2],   # rear_floor_drop
        [0.05, 0.18],  # rear_face_height
        [0.35, 1.1],   # bridge_length
        [-0.05, 0.35], # tail_z_offset
        [0.18, 0.55],  # nose_length
        [0.15, 0.9],   # nose_bluntness
        [0.7, 1.4],    # global_scale
    ]
)


def _col(x, i):
    return x[:, i]


def interp_width(y_c, z_c, z_e):
    """Width-profile interpolation: at tied z knots the maximum y wins.

    Degenerate flat roofs/floors produce runs of identical z; collapsing
    each run to its widest sample makes the interpolated profile the true
    width function (and exact for rectangles). Rows without ties take the
    plain bracketing path.
    """
    tol = 1e-9
    zv = z_c.values
    order = np.argsort(zv, axis=1, kind="stable")
    zs_sorted = np.take_along_axis(zv, order, axis=1)
    tie_rows = np.any(np.diff(zs_sorted, axis=1) < tol, axis=1)
    if not tie_rows.any():
        return bz.interp_at_z(y_c, z_c, z_e)
    yv = y_c.values
    s = zv.shape[1]
    idx_keep = order.copy()
    for b in np.nonzero(tie_rows)[0]:
        zr = zs_sorted[b]
        yr = yv[b][order[b]]
        starts = np.concatenate([[0], np.nonzero(np.diff(zr) >= tol)[0] + 1])
        keep = []
        for ui in range(len(starts)):
            lo = starts[ui]
            hi = starts[ui + 1] if ui + 1 < len(starts) else s
            keep.append(order[b, lo + np.argmax(yr[lo:hi])])
        idx_keep[b] = np.array(keep + [keep[-1]] * (s - len(keep)))
    ys = tp.gather(y_c, idx_keep, axis=1)
    zs = tp.gather(z_c, idx_keep, axis=1)
    return bz.interp_at_z(ys, zs, z_e)


@dataclass
class Section:
    """One extruded half cross-section, centered vertically at z_center."""

    halfwidth: tp.Tensor
    roof_rise: tp.Tensor
    floor_drop: tp.Tensor
    face_height: tp.Tensor
    z_center: tp.Tensor

    def roof_ctrl(self):
        """Cubic from top centerline to the upper face edge, (B,4,2) as (y,z)."""
        w, hr, s, zc = self.halfwidth, self.roof_rise, self.face_height, self.z_center
        z_top = zc + s * 0.5 + hr
        z_edge = zc + s * 0.5
        zeros = w * 0.0
        p0 = tp.stack([zeros, z_top], axis=-1)
        p1 = tp.stack([w * SHAPE_COEF, z_top], axis=-1)
        p2 = tp.stack([w, z_edge + hr * SHAPE_COEF], axis=-1)
        p3 = tp.stack([w, z_edge], axis=-1)
        return tp.stack([p0, p1, p2, p3], axis=1)

    def floor_ctrl(self):
        """Cubic from the lower face edge back to the bottom centerline."""
        w, hf, s, zc = self.halfwidth, self.floor_drop, self.face_height, self.z_center
        z_edge = zc - s * 0.5
        z_bot = zc - s * 0.5 - hf
        zeros = w * 0.0
        p0 = tp.stack([w, z_edge], axis=-1)
        p1 = tp.stack([w, z_edge - hf * SHAPE_COEF], axis=-1)
        p2 = tp.stack([w * SHAPE_COEF, z_bot], axis=-1)
        p3 = tp.stack([zeros, z_bot], axis=-1)
        return tp.stack([p0, p1, p2, p3], axis=1)

    def boundary_polyline(self, r=25):
        """Half-section boundary from top centerline to bottom, (B, 2r, 2).

        The roof's last sample and the floor's first sample are the face
        edges, so the implied connecting segment is the planar face itself
        and the path is a valid closed boundary against the symmetry axis.
        """
        roof = bz.curve_polyline(self.roof_ctrl(), r)
        floor = bz.curve_polyline(self.floor_ctrl(), r)
        return tp.concat([roof, floor], axis=1)

    def width_samples(self, r=25):
        """(y, z) samples ordered bottom-up for width-profile interpolation."""
        roof = bz.curve_polyline(self.roof_ctrl(), r)
        floor = bz.curve_polyline(self.floor_ctrl(), r)
        rev = np.arange(r - 1, -1, -1)
        return tp.concat([floor[:, rev, :], roof[:, rev, :]], axis=1)

    def z_top(self):
        return self.z_center + self.face_height * 0.5 + self.roof_rise

    def z_bottom(self):
        return self.z_center - self.face_height * 0.5 - self.floor_drop


@dataclass
class FuselageBatch:
    params: tp.Tensor  # (B,15) scaled values view is params_scaled
    front: Section
    rear: Section
    front_length: tp.Tensor
    rear_length: tp.Tensor
    bridge_length: tp.Tensor
    nose_length: tp.Tensor
    bluntness: tp.Tensor

    @property
    def batch(self):
        return self.params.shape[0]

    # -- axial layout ------------------------------------------------------

    def x_front(self):
        zero = self.front_length * 0.0
        return zero, self.front_length

    def x_bridge(self):
        return self.front_length, self.front_length + self.bridge_length

    def x_rear(self):
        start = self.front_length + self.bridge_length
        return start, start + self.rear_length

    def x_nose(self):
        return -self.nose_length, self.nose_length * 0.0

    def total_length(self):
        return self.nose_length + self.front_length + self.bridge_length + self.rear_length

    # -- wing interfaces ----------------------------------------------------

    def wingbase_xyz(self):
        """Centroids of the two planar interface faces -> (B, 2, 3)."""
        x0f, x1f = self.x_front()
        x0r, x1r = self.x_rear()
        front = tp.stack(
            [(x0f + x1f) * 0.5, self.front.halfwidth, self.front.z_center], axis=-1
        )
        rear = tp.stack([(x0r + x1r) * 0.5, self.rear.halfwidth, self.rear.z_center], axis=-1)
        return tp.stack([front, rear], axis=1)

    def interface_dims(self):
        """Face height and extrusion length per interface -> (B, 2, 2)."""
        front = tp.stack([self.front.face_height, self.front_length], axis=-1)
        rear = tp.stack([self.rear.face_height, self.rear_length], axis=-1)
        return tp.stack([front, rear], axis=1)

    def interface_dihedral(self):
        """Cant angle each interface prescribes for its wing -> (B, 2).

        Derived from the section's roof/floor asymmetry so the constraint
        genuinely couples wing orientation to fuselage shape.
        """
        f = tp.atan2(
            (self.front.roof_rise - self.front.floor_drop) * 0.5, self.front.halfwidth * 4.0
        )
        r = tp.atan2(
            (self.rear.roof_rise - self.rear.floor_drop) * 0.5, self.rear.halfwidth * 4.0
        )
        return tp.stack([f, r], axis=1)

    # -- patches -------------------------------------------------------------

    def _section_curves3d(self, section, x_at):
        """Roof/face/floor control points lifted to 3D at a given x plane."""
        roof = section.roof_ctrl()
        floor = section.floor_ctrl()
        w, s, zc = section.halfwidth, section.face_height, section.z_center
        ts = np.linspace(0.0, 1.0, 4)
        face_pts = [
            tp.stack([w, zc + s * (0.5 - t)], axis=-1) for t in ts
        ]
        face = tp.stack(face_pts, axis=1)
        out = []
        for curve in (roof, face, floor):
            x = tp.reshape(x_at, (-1, 1, 1)) + curve[:, :, 0:1] * 0.0
            out.append(tp.concat([x, curve], axis=2))
        return out  # list of (B,4,3)

    def bridge_patches(self):
        """Three bicubic patches blending front to rear sections -> list (B,4,4,3)."""
        x0, x1 = self.x_bridge()
        front_curves = self._section_curves3d(self.front, x0)
        rear_curves = self._section_curves3d(self.rear, x1)
        lb = self.bridge_length
        patches = []
        for fc, rc in zip(front_curves, rear_curves):
            rows = []
            for r, (curve, shift) in enumerate(
                [(fc, 0.0), (fc, 1.0 / 3.0), (rc, -1.0 / 3.0), (rc, 0.0)]
            ):
                x = curve[:, :, 0] + tp.reshape(lb * shift, (-1, 1))
                rows.append(tp.stack([x, curve[:, :, 1], curve[:, :, 2]], axis=-1))
            patches.append(tp.stack(rows, axis=1))
        return patches

    def nose_patches(self):
        """Three bicubic patches closing the front section to a tip point."""
        x0f, _ = self.x_front()
        front_curves = self._section_curves3d(self.front, x0f)
        ln, q = self.nose_length, self.bluntness
        zc = self.front.z_center
        sig1 = 2.0 / 3.0 + q / 3.0
        sig2 = 1.0 / 3.0 + q * 0.52
        sigmas = [None, sig1, sig2, None]
        patches = []
        for fc in front_curves:
            rows = []
            for r in range(4):
                xr = fc[:, :, 0] - tp.reshape(ln * (r / 3.0), (-1, 1))
                if r == 0:
                    y = fc[:, :, 1]
                    z = fc[:, :, 2]
                elif r == 3:
                    y = fc[:, :, 1] * 0.0
                    z = fc[:, :, 2] * 0.0 + tp.reshape(zc, (-1, 1))
                else:
                    s = tp.reshape(sigmas[r], (-1, 1))
                    y = fc[:, :, 1] * s
                    z = tp.reshape(zc, (-1, 1)) + (fc[:, :, 2] - tp.reshape(zc, (-1, 1))) * s
                rows.append(tp.stack([xr, y, z], axis=-1))
            patches.append(tp.stack(rows, axis=1))
        return patches

    # -- integral properties --------------------------------------------------

    def segment_area_volume(self, section, length, r=40):
        """Surface area, volume and half cross-section area of one segment.

        The 1D tessellation walks roof, face and floor; the reported area
        and volume include the factor 2 for the mirrored half.
        """
        poly = section.boundary_polyline(r)
        # the roof-to-floor concatenation already includes the planar face
        # as the implicit edge between the two sample runs
        arc, swept = bz.polyline_length_and_swept_area(poly)
        half_area = tp.absolute(swept)
        surface = arc * length * 2.0
        volume = half_area * length * 2.0
        return surface, volume, half_area

    def area_volume(self, n=10, r=40):
        """Total wetted surface area and enclosed volume -> (S, V) each (B,)."""
        s_f, v_f, _ = self.segment_area_volume(self.front, self.front_length, r)
        s_r, v_r, _ = self.segment_area_volume(self.rear, self.rear_length, r)
        s_tot = s_f + s_r
        v_tot = v_f + v_r
        for patch in self.bridge_patches() + self.nose_patches():
            ps, pv = bz.surface_area_volume(patch, n)
            s_tot = s_tot + ps * 2.0
            v_tot = v_tot + pv * 2.0
        return s_tot, v_tot

    def frontal_area(self, n_slices=20, r=25):
        """Outer-envelope frontal area from the primary segments -> (B,).

        Equally spaced z slices between the pooled vertical extents; each
        segment contributes its interpolated half-width, the envelope takes
        the maximum, and the trapezoid sum is doubled for symmetry.
        """
        z_top = tp.maximum(self.front.z_top(), self.rear.z_top())
        z_bot = tp.minimum(self.front.z_bottom(), self.rear.z_bottom())
        span = z_top.values - z_bot.values
        if np.any(span <= 0):
            raise ValueError("degenerate vertical extent in frontal area")
        w = np.linspace(0.0, 1.0, n_slices)
        z_e = tp.reshape(z_bot, (-1, 1)) * (1.0 - w) + tp.reshape(z_top, (-1, 1)) * w
        widths = []
        for section in (self.front, self.rear):
            poly = section.width_samples(r)
            widths.append(interp_width(poly[:, :, 0], poly[:, :, 1], z_e))
        y_outer = tp.maximum(widths[0], widths[1])
        dz = z_e[:, 1:] - z_e[:, :-1]
        y_avg = (y_outer[:, 1:] + y_outer[:, :-1]) * 0.5
        return tp.sum_(dz * y_avg, axis=1) * 2.0

    def fineness_ratio(self):
        """Length over max diameter proxy for the drag correlation."""
        depth_f = self.front.z_top() - self.front.z_bottom()
        depth_r = self.rear.z_top() - self.rear.z_bottom()
        width = tp.maximum(self.front.halfwidth, self.rear.halfwidth) * 2.0
        diam = tp.maximum(tp.maximum(depth_f, depth_r), width)
        return self.total_length() / diam

    def section_curve_batch(self):
        """All four primary-segment cubics (roof/floor x front/rear), (4B,4,2)."""
        return tp.concat(
            [
                self.front.roof_ctrl(),
                self.front.floor_ctrl(),
                self.rear.roof_ctrl(),
                self.rear.floor_ctrl(),
            ],
            axis=0,
        )


def build_fuselage(x_f):
    """Parse a (B,15) parameter tensor into a FuselageBatch (scale applied)."""
    if x_f.shape[-1] != 15:
        raise ValueError(f"fuselage parameter vector must have 15 entries, got {x_f.shape}")
    k = _col(x_f, 14)
    vals = x_f.values
    if np.any(vals[:, [0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 12]] <= 0):
        raise ValueError("fuselage lengths must be positive")
    if np.any(vals[:, 14] <= 0):
        raise ValueError("global scale must be positive")
    front = Section(
        halfwidth=_col(x_f, 1) * k,
        roof_rise=_col(x_f, 2) * k,
        floor_drop=_col(x_f, 3) * k,
        face_height=_col(x_f, 4) * k,
        z_center=_col(x_f, 0) * 0.0,
    )
    rear = Section(
        halfwidth=_col(x_f, 6) * k,
        roof_rise=_col(x_f, 7) * k,
        floor_drop=_col(x_f, 8) * k,
        face_height=_col(x_f, 9) * k,
        z_center=_col(x_f, 11) * k,
    )
    return FuselageBatch(
        params=x_f,
        front=front,
        rear=rear,
        front_length=_col(x_f, 0) * k,
        rear_length=_col(x_f, 5) * k,
        bridge_length=_col(x_f, 10) * k,
        nose_length=_col(x_f, 12) * k,
        bluntness=_col(x_f, 13),
    )
