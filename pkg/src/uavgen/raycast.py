"""Batched inside/outside tests against the fuselage envelope.

Every query point gets a ray from a guaranteed-interior origin on the
symmetry axis (same x, y=0, z at the local section center). Extruded
primary segments reduce to 2D segment intersections in the yz-plane;
bridge and nose patches are tessellated into triangles and intersected
with zero-x-direction rays. Signed distance is ||P-O|| * (1 - t_hit):
negative inside, positive outside, zero with no hit.

Points provably deeper inside than `prune_margin` (inside the planar
face band common to the local sections) short-circuit to a constant
negative distance: the containment penalty relu(d + margin) is zero there
with zero gradient either way, so the short-circuit is loss-exact.

Discrete pieces (component routing by x, first-valid selection) are
constants in the backward pass; gradients flow through the gathered hit
parameters.
"""

from __future__ import annotations

import numpy as np

from . import bezier as bz
from . import tape as tp

DET_EPS = 1e-6
PRUNE_DISTANCE = -1.0
PATCH_CHUNK = 4096


def _section_raycast(p_yz, o_yz, poly):
    """2D ray-vs-polyline first-hit distances.

    p_yz, o_yz: (M,2) Tensors; poly: (M,S,2) Tensor of boundary samples.
    Returns d = ||P-O|| (1 - t_hit) has_hit.
    """
    a = p_yz - o_yz  # ray direction (M,2)
    seg_a = poly[:, :-1, :]
    c = poly[:, 1:, :] - seg_a  # (M,E,2)
    bvec = tp.reshape(o_yz, (-1, 1, 2)) - seg_a  # O - A per edge
    a1 = tp.reshape(a, (-1, 1, 2))
    den = a1[:, :, 1] * c[:, :, 0] - a1[:, :, 0] * c[:, :, 1]
    num = a1[:, :, 1] * bvec[:, :, 0] - bvec[:, :, 1] * a1[:, :, 0]
    s = num / (den + DET_EPS)
    den_ok = np.abs(den.values) > DET_EPS
    s_ok = den_ok & (s.values >= 0.0) & (s.values <= 1.0)
    # recover t from the better-conditioned coordinate equation
    use_y = np.abs(a.values[:, 1:2]) > np.abs(a.values[:, 0:1])
    t_from_x = (c[:, :, 0] * s - bvec[:, :, 0]) / tp.where(
        np.abs(a1.values[:, :, 0]) > DET_EPS, a1[:, :, 0], a1[:, :, 0] * 0.0 + DET_EPS
    )
    t_from_y = (c[:, :, 1] * s - bvec[:, :, 1]) / tp.where(
        np.abs(a1.values[:, :, 1]) > DET_EPS, a1[:, :, 1], a1[:, :, 1] * 0.0 + DET_EPS
    )
    t = tp.where(use_y, t_from_y, t_from_x)
    valid = s_ok & (t.values > 0.0)
    first = np.argmax(valid, axis=1)
    t_hit = tp.gather(t, first[:, None], axis=1)[:, 0]
    has_hit = valid.any(axis=1)
    dist = tp.norm(a, axis=-1)
    return dist * (1.0 - t_hit) * has_hit.astype(float)


def _element_triangles(patches, rows, nu=4, nv=8):
    """Tessellate patches for the given batch rows -> (R, T, 3, 3) corners."""
    tris = []
    for patch in patches:
        grid = bz.surface_grid(patch[rows], nu, nv)
        v00 = grid[:, :-1, :-1, :]
        v10 = grid[:, 1:, :-1, :]
        v01 = grid[:, :-1, 1:, :]
        v11 = grid[:, 1:, 1:, :]
        r = grid.shape[0]

        def flat(t):
            return tp.reshape(t, (r, (nu - 1) * (nv - 1), 3))

        tris.append(tp.stack([flat(v00), flat(v10), flat(v01)], axis=2))
        tris.append(tp.stack([flat(v11), flat(v01), flat(v10)], axis=2))
    return tp.concat(tris, axis=1)


def _triangle_raycast(p, o, tris):
    """Moller-Trumbore first-hit distances for (M,3) rays vs (M,T,3,3) triangles."""
    d = p - o  # (M,3); x component is zero by construction
    v0 = tris[:, :, 0, :]
    e1 = tris[:, :, 1, :] - v0
    e2 = tris[:, :, 2, :] - v0
    d1 = tp.reshape(d, (-1, 1, 3))
    pvec = tp.cross3(d1, e2)
    det = tp.sum_(e1 * pvec, axis=2)
    det_ok = np.abs(det.values) > DET_EPS
    det_safe = tp.where(det_ok, det, det * 0.0 + DET_EPS)
    tvec = tp.reshape(o, (-1, 1, 3)) - v0
    u = tp.sum_(tvec * pvec, axis=2) / det_safe
    qvec = tp.cross3(tvec, e1)
    v = tp.sum_(d1 * qvec, axis=2) / det_safe
    t = tp.sum_(e2 * qvec, axis=2) / det_safe
    tol = 1e-9
    valid = (
        det_ok
        & (u.values >= -tol)
        & (v.values >= -tol)
        & (u.values + v.values <= 1.0 + tol)
        & (t.values > 0.0)
    )
    first = np.argmax(valid, axis=1)
    t_hit = tp.gather(t, first[:, None], axis=1)[:, 0]
    has_hit = valid.any(axis=1)
    dist = tp.norm(d, axis=-1)
    return dist * (1.0 - t_hit) * has_hit.astype(float)


def _face_band_prune(points_vals, y_max, z_lo, z_hi, margin):
    """Provably-inside test against a per-element planar face band."""
    y = np.abs(points_vals[:, :, 1])
    z = points_vals[:, :, 2]
    return (
        (y <= y_max[:, None] - margin)
        & (z >= z_lo[:, None] + margin)
        & (z <= z_hi[:, None] - margin)
    )


def ray_cast_signed_distance(points, fus, section_res=25, prune_margin=0.02):
    """Signed distances of (B,N,3) points to the fuselage surface.

    Returns (d, outside_extent_flags). d < 0 inside, > 0 outside. Points
    beyond the axial extent get the nearest section's yz distance (clipped
    to outside) plus the axial overhang, flagged per point. Points pruned
    as provably inside report the constant PRUNE_DISTANCE.
    """
    b, n = points.shape[0], points.shape[1]
    pv = points.values
    x = pv[:, :, 0]
    x0f, x1f = fus.x_front()
    x0r, x1r = fus.x_rear()
    x_nose = -fus.nose_length.values
    front_mask = (x >= x0f.values[:, None]) & (x <= x1f.values[:, None])
    rear_mask = (x >= x0r.values[:, None]) & (x <= x1r.values[:, None]) & ~front_mask
    bridge_mask = (x > x1f.values[:, None]) & (x < x0r.values[:, None])
    nose_mask = (x >= x_nose[:, None]) & (x < x0f.values[:, None])
    off_mask = ~(front_mask | rear_mask | bridge_mask | nose_mask)

    w_f = fus.front.halfwidth.values
    w_r = fus.rear.halfwidth.values
    s_f = fus.front.face_height.values
    s_r = fus.rear.face_height.values
    zc_f = fus.front.z_center.values
    zc_r = fus.rear.z_center.values
    if prune_margin > 0:
        prune = np.zeros((b, n), dtype=bool)
        prune |= front_mask & _face_band_prune(
            pv, w_f, zc_f - s_f / 2, zc_f + s_f / 2, prune_margin
        )
        prune |= rear_mask & _face_band_prune(
            pv, w_r, zc_r - s_r / 2, zc_r + s_r / 2, prune_margin
        )
        prune |= bridge_mask & _face_band_prune(
            pv,
            np.minimum(w_f, w_r),
            np.maximum(zc_f - s_f / 2, zc_r - s_r / 2),
            np.minimum(zc_f + s_f / 2, zc_r + s_r / 2),
            prune_margin,
        )
        front_mask &= ~prune
        rear_mask &= ~prune
        bridge_mask &= ~prune
    else:
        prune = np.zeros((b, n), dtype=bool)

    d_total = None
    polys = {}

    def section_poly(which):
        if which not in polys:
            sec = fus.front if which == "front" else fus.rear
            polys[which] = sec.boundary_polyline(section_res)
        return polys[which]

    def add(contrib):
        nonlocal d_total
        d_total = contrib if d_total is None else d_total + contrib

    if prune.any():
        bi, pi = np.nonzero(prune)
        add(tp.put((b, n), (bi, pi), tp.Tensor(np.full(bi.size, PRUNE_DISTANCE))))

    def run_section(mask, which, extra_overhang=None):
        bi, pi = np.nonzero(mask)
        if bi.size == 0:
            return
        sec = fus.front if which == "front" else fus.rear
        p_sub = points[bi, pi]
        p_yz = tp.stack([tp.absolute(p_sub[:, 1]), p_sub[:, 2]], axis=-1)
        zc = sec.z_center[bi]
        o_yz = tp.stack([zc * 0.0, zc], axis=-1)
        poly = section_poly(which)[bi]
        d_sub = _section_raycast(p_yz, o_yz, poly)
        if extra_overhang is not None:
            d_sub = tp.relu(d_sub) + extra_overhang[bi, pi]
        add(tp.put((b, n), (bi, pi), d_sub))

    run_section(front_mask, "front")
    run_section(rear_mask, "rear")

    def run_patches(mask, patches, zc_fn):
        bi_all, pi_all = np.nonzero(mask)
        if bi_all.size == 0:
            return
        for start in range(0, bi_all.size, PATCH_CHUNK):
            bi = bi_all[start : start + PATCH_CHUNK]
            pi = pi_all[start : start + PATCH_CHUNK]
            rows, inv = np.unique(bi, return_inverse=True)
            p_sub = points[bi, pi]
            p_abs = tp.stack(
                [p_sub[:, 0], tp.absolute(p_sub[:, 1]), p_sub[:, 2]], axis=-1
            )
            o_sub = tp.stack(
                [p_sub[:, 0], p_sub[:, 0] * 0.0, zc_fn(bi, p_sub)], axis=-1
            )
            tris = _element_triangles(patches, rows)[inv]
            d_sub = _triangle_raycast(p_abs, o_sub, tris)
            add(tp.put((b, n), (bi, pi), d_sub))

    if bridge_mask.any():
        zr = fus.rear.z_center

        def bridge_zc(bi, p_sub):
            u = (p_sub[:, 0] - x1f[bi]) / fus.bridge_length[bi]
            return zr[bi] * u

        run_patches(bridge_mask, fus.bridge_patches(), bridge_zc)
    if nose_mask.any():
        run_patches(nose_mask, fus.nose_patches(), lambda bi, p_sub: p_sub[:, 0] * 0.0)

    if off_mask.any():
        overhang_front = tp.relu(
            tp.reshape(-fus.nose_length, (-1, 1)) - points[:, :, 0]
        )
        overhang_rear = tp.relu(points[:, :, 0] - tp.reshape(x1r, (-1, 1)))
        overhang = overhang_front + overhang_rear
        before = x < x_nose[:, None]
        run_section(off_mask & before, "front", extra_overhang=overhang)
        run_section(off_mask & ~before, "rear", extra_overhang=overhang)

    if d_total is None:
        d_total = points[:, :, 0] * 0.0
    return d_total, off_mask
