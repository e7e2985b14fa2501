"""Batched cubic Bezier curves and bicubic patches.

Curves carry control points (B,4,2) or (B,4,3); patches (B,4,4,3). All
evaluation routines are tape-differentiable in the control points. The
validity checks (curvature-sign convexity, self-intersection) are
reporting-only and run on plain values.
"""

from __future__ import annotations

import numpy as np

from . import tape as tp


def bernstein_matrix(t):
    """Cubic Bernstein basis evaluated at params t -> constant (len(t), 4)."""
    t = np.asarray(t, dtype=np.float64)
    s = 1.0 - t
    return np.stack([s**3, 3 * s**2 * t, 3 * s * t**2, t**3], axis=-1)


def bernstein_deriv_matrix(t):
    t = np.asarray(t, dtype=np.float64)
    s = 1.0 - t
    return np.stack(
        [-3 * s**2, 3 * s**2 - 6 * s * t, 6 * s * t - 3 * t**2, 3 * t**2], axis=-1
    )


def bernstein_weights_tensor(t):
    """Bernstein basis of a Tensor of params; returns Tensor (..., 4)."""
    one = 1.0 - t
    return tp.stack([one**3.0, 3.0 * one**2.0 * t, 3.0 * one * t**2.0, t**3.0], axis=-1)


def curve_points(ctrl, t):
    """Evaluate a curve batch at constant params t -> (B, len(t), D)."""
    basis = bernstein_matrix(t)
    return tp.matmul(tp.Tensor(basis), ctrl)


def bezier_surface_eval(ctrl, u, v):
    """Point on each patch at scalar (u, v) in the unit square -> (B, 3)."""
    if not (0.0 <= u <= 1.0 and 0.0 <= v <= 1.0):
        raise ValueError(f"surface parameters must lie in [0,1], got ({u}, {v})")
    w = np.outer(bernstein_matrix([u])[0], bernstein_matrix([v])[0]).reshape(1, 16)
    b = ctrl.shape[0]
    flat = tp.reshape(ctrl, (b, 16, 3))
    return tp.reshape(tp.matmul(tp.Tensor(w), flat), (b, 3))


def surface_grid(ctrl, nu, nv=None):
    """Evaluate each patch on an (nu x nv) uniform parameter grid -> (B,nu,nv,3)."""
    nv = nu if nv is None else nv
    bu = bernstein_matrix(np.linspace(0.0, 1.0, nu))
    bv = bernstein_matrix(np.linspace(0.0, 1.0, nv))
    b = ctrl.shape[0]
    rows = tp.matmul(tp.Tensor(bu), tp.reshape(ctrl, (b, 4, 12)))  # (B,nu,12)
    rows = tp.reshape(rows, (b * nu, 4, 3))
    pts = tp.matmul(tp.Tensor(bv), rows)  # (B*nu, nv, 3)
    return tp.reshape(pts, (b, nu, nv, 3))


def surface_area_volume(ctrl, n=10):
    """Tessellated patch area and y-projected volume contribution.

    Area sums the cross-product magnitude of cell edge vectors over the
    (n-1)^2 grid cells; volume accumulates |n_y| * |B_y + C_y| / 2, the
    y-projection integral used for half-shells symmetric about xz.
    """
    if n < 2:
        raise ValueError("tessellation resolution must be >= 2")
    grid = surface_grid(ctrl, n)
    a = grid[:, :-1, :-1, :]
    bb = grid[:, 1:, :-1, :]
    cc = grid[:, :-1, 1:, :]
    d1 = bb - a
    d2 = cc - a
    nvec = tp.cross3(d1, d2)
    area = tp.sum_(tp.norm(nvec, axis=-1), axis=(1, 2))
    ny = tp.absolute(nvec[:, :, :, 1])
    ybar = tp.absolute(bb[:, :, :, 1] + cc[:, :, :, 1]) * 0.5
    volume = tp.sum_(ny * ybar, axis=(1, 2))
    return area, volume


def curve_polyline(ctrl, r=50):
    """Dense 1D tessellation of each curve -> points (B, r, D)."""
    return curve_points(ctrl, np.linspace(0.0, 1.0, r))


def polyline_length_and_swept_area(points):
    """Arc length and signed y-dz integral of a (B, r, 2) polyline.

    Columns are (y, z). The swept-area term integrates y over z along the
    polyline; for a section boundary running from the symmetry axis back to
    the symmetry axis its magnitude is the area enclosed against the axis.
    """
    d = points[:, 1:, :] - points[:, :-1, :]
    length = tp.sum_(tp.norm(d, axis=-1), axis=1)
    ybar = (points[:, 1:, 0] + points[:, :-1, 0]) * 0.5
    area = tp.sum_(ybar * d[:, :, 1], axis=1)
    return length, area


def interp_at_z(y_c, z_c, z_e, eps=1e-12):
    """Piecewise-linear interpolation of (y_c over z_c) at queries z_e.

    Samples are sorted by z per row; bracketing uses left-bisect indices
    treated as constants; the denominator guard keeps gradients finite on
    flat spans; queries outside the sampled z-range return exactly zero.
    """
    order = tp.argsort_values(z_c, axis=1)
    zs = tp.gather(z_c, order, axis=1)
    ys = tp.gather(y_c, order, axis=1)
    r = zs.shape[1]
    idx_r = tp.searchsorted(zs, z_e)
    idx_l = np.clip(idx_r - 1, 0, r - 2)
    idx_r = np.clip(idx_r, 1, r - 1)
    z_l = tp.gather(zs, idx_l, axis=1)
    z_r = tp.gather(zs, idx_r, axis=1)
    y_l = tp.gather(ys, idx_l, axis=1)
    y_r = tp.gather(ys, idx_r, axis=1)
    t = (z_e - z_l) / tp.maximum(z_r - z_l, eps)
    y_e = (1.0 - t) * y_l + t * y_r
    in_range = (t.values >= 0.0) & (t.values <= 1.0)
    return y_e * in_range.astype(np.float64)


def interpolate_curve_at_z(ctrl, z_e, r=50):
    """Dense-sample a curve, then bracket and lerp width at given heights.

    ctrl is a (B,4,2) batch with columns (y, z); z_e is (B,N).
    """
    pts = curve_polyline(ctrl, r)
    y_c = pts[:, :, 0]
    z_c = pts[:, :, 1]
    return interp_at_z(y_c, z_c, z_e)


def _power_basis(ctrl_vals):
    """Cubic power-basis coefficients a t^3 + b t^2 + c t + d per batch."""
    p0, p1, p2, p3 = (ctrl_vals[:, i, :] for i in range(4))
    a = -p0 + 3 * p1 - 3 * p2 + p3
    b = 3 * p0 - 6 * p1 + 3 * p2
    c = -3 * p0 + 3 * p1
    d = p0
    return a, b, c, d


def convexity_violations(ctrl, samples=50, kappa_tol=1e-9):
    """Count signed-curvature sign changes at uniformly spaced params.

    Near-zero curvature (|kappa| < kappa_tol) is sign-neutral. Returns an
    int array (B,); raises on degenerate curves (vanishing derivative).
    """
    vals = ctrl.values if isinstance(ctrl, tp.Tensor) else np.asarray(ctrl, float)
    t = np.linspace(0.0, 1.0, samples)
    d1m = bernstein_deriv_matrix(t)
    s = 1.0 - t
    d2m = np.stack([6 * s, 6 * t - 12 * s, 6 * s - 12 * t, 6 * t], axis=-1)
    d1 = np.einsum("ri,bij->brj", d1m, vals)
    d2 = np.einsum("ri,bij->brj", d2m, vals)
    speed = np.linalg.norm(d1, axis=-1)
    if np.any(speed <= 1e-9):
        bad = np.unique(np.nonzero(speed <= 1e-9)[0])
        raise ValueError(f"degenerate curve(s) at batch indices {bad.tolist()}")
    kappa = (d1[:, :, 0] * d2[:, :, 1] - d2[:, :, 0] * d1[:, :, 1]) / speed**3
    sign = np.where(np.abs(kappa) < kappa_tol, 0, np.sign(kappa)).astype(int)
    counts = np.zeros(vals.shape[0], dtype=int)
    for b in range(vals.shape[0]):
        nz = sign[b][sign[b] != 0]
        if nz.size > 1:
            counts[b] = int(np.sum(nz[1:] != nz[:-1]))
    return counts


def self_intersection(ctrl, tol=1e-9):
    """True where a curve crosses itself: B(t1) = B(t2), t1 != t2 in [0,1].

    Solved in closed form through the symmetric functions s = t1 + t2 and
    p = t1 t2 of the power-basis system.
    """
    vals = ctrl.values if isinstance(ctrl, tp.Tensor) else np.asarray(ctrl, float)
    a, b, c, _ = _power_basis(vals)
    flags = np.zeros(vals.shape[0], dtype=bool)
    den = a[:, 1] * b[:, 0] - a[:, 0] * b[:, 1]
    num = a[:, 0] * c[:, 1] - a[:, 1] * c[:, 0]
    anorm = np.linalg.norm(a, axis=1)
    for i in range(vals.shape[0]):
        if anorm[i] < tol or abs(den[i]) < tol * max(anorm[i], 1.0):
            continue
        s = num[i] / den[i]
        if abs(a[i, 0]) >= abs(a[i, 1]):
            p = s * s + (b[i, 0] * s + c[i, 0]) / a[i, 0]
        else:
            p = s * s + (b[i, 1] * s + c[i, 1]) / a[i, 1]
        disc = s * s - 4.0 * p
        if disc <= tol:
            continue
        root = np.sqrt(disc)
        t1 = 0.5 * (s - root)
        t2 = 0.5 * (s + root)
        if -tol <= t1 <= 1 + tol and -tol <= t2 <= 1 + tol and abs(t2 - t1) > tol:
            flags[i] = True
    return flags
