"""Triangulated mesh assembly for rendering and export.

Each part (fuselage, both wings, each payload box) is an edge-closed
triangle mesh at the chosen tessellation: tube strips between section
rings, fans over end caps and the nose tip. Vertices are flat float
lists, faces flat index triples, per-part tags name the component.
"""

from __future__ import annotations

import json

import numpy as np

from . import bezier as bz
from . import tape as tp

SECTION_SAMPLES = 12  # per curve per half-section


def _ring_from_half(half):
    """Mirror a y>=0 half-section polyline into a closed ring (no dups)."""
    mirrored = half[::-1].copy()
    mirrored[:, 0] *= -1.0
    ring = np.concatenate([half, mirrored[1:-1]], axis=0)
    return ring


def _section_half(section, r=SECTION_SAMPLES):
    """Half-section samples matching the patch rows: roof, face, floor."""
    with tp.no_grad():
        roof = bz.curve_polyline(section.roof_ctrl(), r).values[0]
        floor = bz.curve_polyline(section.floor_ctrl(), r).values[0]
    w = section.halfwidth.values[0]
    s = section.face_height.values[0]
    zc = section.z_center.values[0]
    ts = np.linspace(0.0, 1.0, r)
    face = np.stack([np.full(r, w), zc + s * (0.5 - ts)], axis=-1)
    return np.concatenate([roof, face, floor], axis=0)


def _section_ring(section, x, r=SECTION_SAMPLES):
    ring2d = _ring_from_half(_section_half(section, r))
    ring = np.zeros((ring2d.shape[0], 3))
    ring[:, 0] = x
    ring[:, 1] = ring2d[:, 0]
    ring[:, 2] = ring2d[:, 1]
    return ring


def _tube(rings):
    """Triangle strip between consecutive equal-length rings."""
    verts = np.concatenate(rings, axis=0)
    n = rings[0].shape[0]
    faces = []
    for k in range(len(rings) - 1):
        a = k * n
        b = (k + 1) * n
        for i in range(n):
            j = (i + 1) % n
            faces.append([a + i, a + j, b + i])
            faces.append([b + i, a + j, b + j])
    return verts, np.asarray(faces, dtype=np.int64)


def _fan(ring, apex, flip=False):
    verts = np.concatenate([ring, apex[None]], axis=0)
    n = ring.shape[0]
    apex_idx = n
    faces = []
    for i in range(n):
        j = (i + 1) % n
        tri = [i, j, apex_idx] if not flip else [j, i, apex_idx]
        faces.append(tri)
    return verts, np.asarray(faces, dtype=np.int64)


def _merge(pieces, weld_tol=1e-9):
    """Concatenate pieces and weld coincident vertices so seams close."""
    verts = []
    faces = []
    offset = 0
    for v, f in pieces:
        verts.append(v)
        faces.append(f + offset)
        offset += v.shape[0]
    verts = np.concatenate(verts, axis=0)
    faces = np.concatenate(faces, axis=0)
    keys = np.round(verts / weld_tol).astype(np.int64)
    seen = {}
    remap = np.zeros(verts.shape[0], dtype=np.int64)
    keep = []
    for i, key in enumerate(map(tuple, keys)):
        if key in seen:
            remap[i] = seen[key]
        else:
            seen[key] = len(keep)
            remap[i] = len(keep)
            keep.append(i)
    welded = verts[keep]
    faces = remap[faces]
    # drop degenerate triangles produced by welded ring endpoints
    ok = (faces[:, 0] != faces[:, 1]) & (faces[:, 1] != faces[:, 2]) & (faces[:, 0] != faces[:, 2])
    return welded, faces[ok]


def _patch_rings(patches, nu=6, nv=SECTION_SAMPLES):
    """Rows of the three bridge/nose patches joined into section rings."""
    grids = []
    for patch in patches:
        with tp.no_grad():
            grids.append(bz.surface_grid(patch[0:1], nu, nv).values[0])
    rings = []
    for i in range(nu):
        half = np.concatenate([g[i] for g in grids], axis=0)
        half2d = half[:, 1:3]
        ring2d = _ring_from_half(half2d)
        ring = np.zeros((ring2d.shape[0], 3))
        ring[:, 0] = half[0, 0]
        ring[:, 1] = ring2d[:, 0]
        ring[:, 2] = ring2d[:, 1]
        rings.append(ring)
    return rings


def fuselage_mesh(fus, element=0):
    """Closed hull for one batch element: nose, front tube, bridge, rear tube, cap."""
    assert element == 0 or fus.batch > element
    idx = slice(element, element + 1)

    def sub(section):
        import copy

        out = copy.copy(section)
        for name in ("halfwidth", "roof_rise", "floor_drop", "face_height", "z_center"):
            setattr(out, name, tp.Tensor(getattr(section, name).values[idx]))
        return out

    import copy

    fus1 = copy.copy(fus)
    fus1.front = sub(fus.front)
    fus1.rear = sub(fus.rear)
    for name in ("front_length", "rear_length", "bridge_length", "nose_length", "bluntness"):
        setattr(fus1, name, tp.Tensor(getattr(fus, name).values[idx]))
    fus1.params = tp.Tensor(fus.params.values[idx])

    x0f, x1f = (t.values[0] for t in fus1.x_front())
    x0r, x1r = (t.values[0] for t in fus1.x_rear())
    pieces = []

    nose_rings = _patch_rings(fus1.nose_patches())
    tip = nose_rings[-1].mean(axis=0)
    pieces.append(_tube(nose_rings[:-1]))
    pieces.append(_fan(nose_rings[-2], tip, flip=True))

    pieces.append(_tube([_section_ring(fus1.front, x0f), _section_ring(fus1.front, x1f)]))
    pieces.append(_tube(_patch_rings(fus1.bridge_patches())))
    rear0 = _section_ring(fus1.rear, x0r)
    rear1 = _section_ring(fus1.rear, x1r)
    pieces.append(_tube([rear0, rear1]))
    pieces.append(_fan(rear1, rear1.mean(axis=0)))
    return _merge(pieces)


def wing_mesh(wing, element=0, mirror=True):
    """Extruded airfoil panel(s) with tip caps, dihedral applied."""
    loop = wing.airfoil.values[element] * wing.chord.values[element]
    root = wing.root.values[element]
    gam = wing.dihedral.values[element]
    half = wing.span.values[element] / 2.0
    direction = np.array([0.0, np.cos(gam), np.sin(gam)])

    def section_at(offset):
        pts = np.zeros((loop.shape[0], 3))
        pts[:, 0] = root[0] + loop[:, 0]
        pts[:, 2] = root[2] + loop[:, 1]
        pts[:, 1] = root[1]
        return pts + direction * offset

    pieces = []
    sides = [1.0, -1.0] if mirror else [1.0]
    for side in sides:
        tipring = section_at(0.0) + direction * (half * side)
        verts, faces = _tube([section_at(0.0), tipring])
        if side < 0:
            faces = faces[:, ::-1]
        pieces.append((verts, faces))
        cap_v, cap_f = _fan(tipring, tipring.mean(axis=0), flip=side > 0)
        pieces.append((cap_v, cap_f))
    if not mirror:
        root = section_at(0.0)
        pieces.append(_fan(root, root.mean(axis=0), flip=False))
    return _merge(pieces)


_BOX_FACES = np.array(
    [
        [0, 1, 3], [0, 3, 2],  # x-
        [4, 6, 7], [4, 7, 5],  # x+
        [0, 4, 5], [0, 5, 1],  # y-
        [2, 3, 7], [2, 7, 6],  # y+
        [0, 2, 6], [0, 6, 4],  # z-
        [1, 5, 7], [1, 7, 3],  # z+
    ],
    dtype=np.int64,
)


def box_mesh(box_set, k, element=0):
    center = box_set.centers.values[element, k]
    dims = box_set.dims.values[element, k]
    signs = np.array([[sx, sy, sz] for sx in (-1, 1) for sy in (-1, 1) for sz in (-1, 1)])
    verts = center + 0.5 * dims * signs
    return verts, _BOX_FACES.copy()


def aircraft_mesh(aircraft, element=0):
    """All parts of one batch element; returns a list of part dicts."""
    parts = []
    v, f = fuselage_mesh(aircraft.fuselage, element)
    parts.append({"name": "fuselage", "vertices": v, "faces": f})
    for i, wing in enumerate(aircraft.wings):
        v, f = wing_mesh(wing, element)
        parts.append({"name": f"wing{i + 1}", "vertices": v, "faces": f})
    for k in range(aircraft.internals.count):
        v, f = box_mesh(aircraft.internals, k, element)
        parts.append({"name": f"box{k + 1}", "vertices": v, "faces": f})
    return parts


def edge_closed(faces):
    """True when every edge is shared by exactly two triangles."""
    from collections import Counter

    count = Counter()
    for tri in faces:
        for a, b in ((tri[0], tri[1]), (tri[1], tri[2]), (tri[2], tri[0])):
            count[(min(a, b), max(a, b))] += 1
    return all(v == 2 for v in count.values())


def mesh_to_payload(parts):
    """Flatten parts for the JSON wire format."""
    return [
        {
            "name": p["name"],
            "vertices": np.asarray(p["vertices"], dtype=np.float64).reshape(-1).tolist(),
            "faces": np.asarray(p["faces"], dtype=np.int64).reshape(-1).tolist(),
        }
        for p in parts
    ]


def save_mesh(path, parts):
    with open(path, "w") as fh:
        json.dump({"version": 1, "parts": mesh_to_payload(parts)}, fh)
