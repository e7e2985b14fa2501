"""Axis-aligned payload boxes: overlap volumes, corner points, hull views."""

from __future__ import annotations

import numpy as np

from . import tape as tp


def box_overlap(centers, dims, margin=0.0):
    """Pairwise overlap volumes of axis-aligned boxes -> (B, K, K).

    Per-axis overlap extent is relu((d_i + d_j)/2 + margin - |c_i - c_j|);
    the product over axes gives the shared volume, with a zero diagonal.
    """
    if margin < 0:
        raise ValueError("margin must be non-negative")
    k = centers.shape[1]
    ci = tp.reshape(centers, (centers.shape[0], k, 1, 3))
    cj = tp.reshape(centers, (centers.shape[0], 1, k, 3))
    di = tp.reshape(dims, (dims.shape[0], k, 1, 3))
    dj = tp.reshape(dims, (dims.shape[0], 1, k, 3))
    ext = tp.relu((di + dj) * 0.5 + margin - tp.absolute(ci - cj))
    vol = ext[:, :, :, 0] * ext[:, :, :, 1] * ext[:, :, :, 2]
    off_diag = 1.0 - np.eye(k)
    return vol * off_diag


_CORNER_SIGNS = np.array(
    [[sx, sy, sz] for sx in (-1, 1) for sy in (-1, 1) for sz in (-1, 1)], dtype=np.float64
)


def box_corners(centers, dims):
    """All eight corner points of each box -> (B, K, 8, 3)."""
    b, k = centers.shape[0], centers.shape[1]
    c = tp.reshape(centers, (b, k, 1, 3))
    d = tp.reshape(dims, (b, k, 1, 3))
    return c + d * (0.5 * _CORNER_SIGNS.reshape(1, 1, 8, 3))


def dedupe_and_sort_points(points, tol=1e-9):
    """Lexicographic sort with near-duplicate collapse (plain values).

    Duplicates are perturbed out of existence by snapping to a tol grid
    and keeping the first representative; padding repeats the last point
    so batched shapes stay rectangular.
    """
    pts = points.values if isinstance(points, tp.Tensor) else np.asarray(points, float)
    out_idx = np.zeros(pts.shape[:2], dtype=int)
    for b in range(pts.shape[0]):
        snapped = np.round(pts[b] / tol) * tol
        order = np.lexsort((snapped[:, 1], snapped[:, 0]))
        keep = []
        last = None
        for i in order:
            key = (snapped[i, 0], snapped[i, 1])
            if key != last:
                keep.append(i)
                last = key
        row = np.asarray(keep + [keep[-1]] * (pts.shape[1] - len(keep)))
        out_idx[b] = row
    return out_idx


def convex_hull_area_2d(points):
    """Differentiable convex-hull area of (B, N, 2) point sets.

    Hull membership comes from the all-points-one-side edge test on
    cross-product signs (O(N^3), discrete); member points are ordered by
    angle around their centroid and fed to the shoelace formula, so
    gradients flow through the selected coordinates only. Collinear sets
    yield zero area.
    """
    if points.shape[1] < 3:
        raise ValueError("need at least 3 points for a hull")
    order = dedupe_and_sort_points(points)
    pts = tp.gather(points, order[:, :, None].repeat(2, axis=2), axis=1)
    vals = pts.values
    b, n = vals.shape[0], vals.shape[1]

    vij = vals[:, None, :, :] - vals[:, :, None, :]  # (B,N,N,2) j relative to i
    pi = vals[:, :, None, None, :]
    pj = vals[:, None, :, None, :]
    pk = vals[:, None, None, :, :]
    cross = (pj[..., 0] - pi[..., 0]) * (pk[..., 1] - pi[..., 1]) - (
        pj[..., 1] - pi[..., 1]
    ) * (pk[..., 0] - pi[..., 0])
    all_geq = np.all(cross >= -1e-12, axis=3)
    all_leq = np.all(cross <= 1e-12, axis=3)
    edge = (all_geq | all_leq) & ~np.eye(n, dtype=bool)[None]
    # an edge of zero length (padded duplicates) must not mark hull points
    seg_len = np.linalg.norm(vij, axis=-1)
    edge &= seg_len > 1e-12
    on_hull = edge.any(axis=2)

    area_parts = []
    for bi in range(b):
        hull_idx = np.nonzero(on_hull[bi])[0]
        if hull_idx.size < 3:
            area_parts.append(tp.sum_(pts[bi : bi + 1, 0:1, 0] * 0.0, axis=1))
            continue
        hull_pts = vals[bi, hull_idx]
        centroid = hull_pts.mean(axis=0)
        ang = np.arctan2(hull_pts[:, 1] - centroid[1], hull_pts[:, 0] - centroid[0])
        ccw = hull_idx[np.argsort(ang, kind="stable")]
        ordered = tp.gather(pts[bi : bi + 1], ccw[None, :, None].repeat(2, axis=2), axis=1)
        x = ordered[:, :, 0]
        y = ordered[:, :, 1]
        x_next = tp.concat([x[:, 1:], x[:, :1]], axis=1)
        y_next = tp.concat([y[:, 1:], y[:, :1]], axis=1)
        area_parts.append(tp.absolute(tp.sum_(x * y_next - x_next * y, axis=1)) * 0.5)
    return tp.concat(area_parts, axis=0)
