"""Wings: analytic airfoil generation, lift, and root-section extents.

The airfoil generator is a smooth four-digit-style thickness plus camber
construction driven by (Mach, Reynolds, section lift coefficient). It
emits a closed 64-point loop in chord-normalized coordinates plus an
angle of attack, all differentiable in its inputs.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import tape as tp

OSWALD_E = 0.8
N_AIRFOIL_POINTS = 64
CAMBER_POS = 0.4

# cosine-spaced chord stations: upper surface TE -> LE, lower LE -> TE
_THETA = np.linspace(0.0, np.pi, N_AIRFOIL_POINTS // 2)
_XC_UPPER = 0.5 * (1.0 + np.cos(_THETA))
_XC_LOWER = 0.5 * (1.0 - np.cos(_THETA))


def _thickness_profile(xc, t_ratio):
    """Four-digit thickness distribution with a closed trailing edge."""
    root = np.sqrt(xc)
    poly = 0.2969 * root - 0.1260 * xc - 0.3516 * xc**2 + 0.2843 * xc**3 - 0.1036 * xc**4
    return t_ratio * (5.0 * poly)


def _camber_line(xc, m):
    p = CAMBER_POS
    fore = xc < p
    y_fore = (2 * p * xc - xc**2) / p**2
    y_aft = ((1 - 2 * p) + 2 * p * xc - xc**2) / (1 - p) ** 2
    return m * np.where(fore, y_fore, y_aft)


def airfoil_standin(mach, reynolds, cl_section):
    """Closed airfoil loop (B,64,2) and angle of attack (B,) in radians.

    Thickness thins with Mach and thickens gently with Reynolds; camber
    carries a fixed share of the demanded section lift, the angle of
    attack supplies the remainder per thin-airfoil slope.
    """
    log_re = tp.log(tp.clamp(reynolds, lo=1.0)) / np.log(10.0)
    t_ratio = 0.10 + 0.03 * tp.tanh(1.5 * (0.35 - mach)) + 0.015 * tp.tanh(log_re - 6.0)
    m_camber = 0.07 * cl_section
    alpha = (cl_section - np.pi * m_camber) / (2.0 * np.pi)

    tr = tp.reshape(t_ratio, (-1, 1))
    mc = tp.reshape(m_camber, (-1, 1))
    pts = []
    for xc, sign in ((_XC_UPPER, 1.0), (_XC_LOWER, -1.0)):
        thick = tp.Tensor(_thickness_profile(xc, 1.0)[None, :]) * tr
        p = CAMBER_POS
        fore = xc < p
        y_fore = (2 * p * xc - xc**2) / p**2
        y_aft = ((1 - 2 * p) + 2 * p * xc - xc**2) / (1 - p) ** 2
        camber = tp.Tensor(np.where(fore, y_fore, y_aft)[None, :]) * mc
        z = camber + sign * thick
        x = tp.Tensor(xc[None, :]) + z * 0.0
        pts.append(tp.stack([x, z], axis=-1))
    loop = tp.concat(pts, axis=1)
    return loop, alpha


def lift_3d_coefficient(cl_section, aspect_ratio):
    """Finite-wing correction C_L = C_l / (1 + C_l / (pi e AR))."""
    return cl_section / (1.0 + cl_section / (np.pi * OSWALD_E * aspect_ratio))


def section_from_3d(cl_3d, aspect_ratio):
    """Invert the finite-wing correction to recover the section coefficient."""
    return cl_3d / (1.0 - cl_3d / (np.pi * OSWALD_E * aspect_ratio))


@dataclass
class WingBatch:
    airfoil: tp.Tensor      # (B,64,2) chord-normalized loop
    alpha: tp.Tensor        # (B,) rad
    span: tp.Tensor         # (B,) m, full span
    chord: tp.Tensor        # (B,) m
    cl_3d: tp.Tensor        # (B,) corrected lift coefficient
    mach: tp.Tensor         # (B,)
    reynolds: tp.Tensor     # (B,)
    cl_section: tp.Tensor   # (B,)
    root: tp.Tensor         # (B,3) root position, m
    dihedral: tp.Tensor     # (B,) rad

    def lift(self, velocity, rho):
        """Supplied lift in newtons: 1/2 rho V^2 C_L c b."""
        return 0.5 * rho * velocity**2 * self.cl_3d * self.chord * self.span

    def mass_proxy(self, alpha_w=1.0):
        """Bending-moment-scaled wing mass surrogate: alpha_w * b^2 * c."""
        return alpha_w * self.span**2.0 * self.chord

    def root_extents(self):
        """Chordwise length and thickness of the root section in meters.

        These are the (b_wing, a_wing) sides of the root bounding box the
        fuselage interface must accommodate.
        """
        z = self.airfoil[:, :, 1]
        thickness = (tp.amax(z, axis=1) - tp.amin(z, axis=1)) * self.chord
        return self.chord, thickness

    def induced_drag(self, velocity, rho):
        ar = self.span / self.chord
        cdi = self.cl_3d**2.0 / (np.pi * OSWALD_E * ar)
        area = self.chord * self.span
        return 0.5 * rho * velocity**2 * area * cdi
