"""Full-aircraft assembly and the batched scoring layer.

The scoring layer maps an assembled aircraft batch to
[O_mass, C_lift, C_wx, C_di, C_bb, C_boxpl] per element, everything
differentiable back into the design parameters. A process-wide counter
tracks forward evaluations (one per batch element per call).
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field

import numpy as np

from . import boxes as bx
from . import raycast
from . import tape as tp
from .cases import G0, get_case
from .fuselage import FuselageBatch
from .wing import WingBatch

ALPHA_WING = 1.0  # wing mass per span^2*chord, normalized units
ALPHA_FUSELAGE = 1.0  # fuselage mass per surface area, normalized units

REPORT_COLUMNS = ["O_mass", "C_lift", "C_wx", "C_di", "C_bb", "C_boxpl"]


class EvalCounter:
    """Thread-safe accumulator for geometry evaluations."""

    def __init__(self):
        self._lock = threading.Lock()
        self._count = 0

    def add(self, n):
        with self._lock:
            self._count += int(n)

    @property
    def count(self):
        with self._lock:
            return self._count

    def reset(self):
        with self._lock:
            self._count = 0


GEOMETRY_EVALS = EvalCounter()


@dataclass
class BoxSetBatch:
    centers: tp.Tensor  # (B,K,3), y fixed at 0
    dims: tp.Tensor     # (B,K,3)
    target_volumes: np.ndarray  # (B,K)

    @property
    def count(self):
        return self.centers.shape[1]

    def volumes(self):
        return self.dims[:, :, 0] * self.dims[:, :, 1] * self.dims[:, :, 2]

    def corners(self):
        return bx.box_corners(self.centers, self.dims)


@dataclass
class AircraftBatch:
    fuselage: FuselageBatch
    wings: tuple  # (front WingBatch, rear WingBatch)
    internals: BoxSetBatch
    lift_requirements: tp.Tensor  # (B,2) newtons, conditions fed to the wing models

    @property
    def batch(self):
        return self.fuselage.batch


@dataclass
class GeometryReport:
    report: tp.Tensor  # (B,6): O_mass, C_lift, C_wx, C_di, C_bb, C_boxpl
    raw: dict          # physical-unit pieces for feasibility adjudication

    def column(self, name):
        return self.report[:, REPORT_COLUMNS.index(name)]

    @property
    def values(self):
        return self.report.values


def mass_objective(aircraft, case):
    """Dimensionless mass: wing and fuselage proxies over total cargo mass."""
    case = get_case(case)
    total_cargo = case.total_cargo_mass
    if total_cargo <= 0:
        raise ValueError("total internals mass must be positive")
    m_wing = sum(w.mass_proxy(ALPHA_WING) for w in aircraft.wings)
    surf, _ = aircraft.fuselage.area_volume()
    m_fus = surf * ALPHA_FUSELAGE
    return (m_wing + m_fus) / total_cargo, m_wing, m_fus


def lift_required(m_wing, m_fus, case):
    case = get_case(case)
    return (m_wing + m_fus + case.total_cargo_mass) * G0


def constraints(aircraft, case, m_wing=None, m_fus=None):
    """The five coupling constraints, normalized, plus raw physical pieces."""
    case = get_case(case)
    fus = aircraft.fuselage
    w1, w2 = aircraft.wings
    if m_wing is None or m_fus is None:
        _, m_wing, m_fus = mass_objective(aircraft, case)

    rho = case.rho
    l_req = lift_required(m_wing, m_fus, case)
    l1 = w1.lift(case.velocity, rho)
    l2 = w2.lift(case.velocity, rho)
    c_lift = (l_req - (l1 + l2)) / l_req

    anchors = fus.wingbase_xyz()
    length = fus.total_length()
    wx1 = tp.absolute(w1.root[:, 1] - anchors[:, 0, 1])
    wx2 = tp.norm(w2.root - anchors[:, 1, :], axis=-1)
    c_wx = (wx1 + wx2) / length

    fus_di = fus.interface_dihedral()
    di1 = tp.absolute(w1.dihedral - fus_di[:, 0])
    di2 = tp.absolute(w2.dihedral - fus_di[:, 1])
    c_di = di1 + di2  # radians

    iface = fus.interface_dims()
    bb_terms = []
    for i, w in enumerate((w1, w2)):
        b_wing, a_wing = w.root_extents()
        bb_terms.append(tp.relu(a_wing - iface[:, i, 0]) + tp.relu(b_wing - iface[:, i, 1]))
    iface_height = (iface[:, 0, 0] + iface[:, 1, 0]) * 0.5
    c_bb = (bb_terms[0] + bb_terms[1]) / iface_height

    corners = aircraft.internals.corners()
    b = corners.shape[0]
    flat = tp.reshape(corners, (b, aircraft.internals.count * 8, 3))
    d, off_flags = raycast.ray_cast_signed_distance(flat, fus)
    c_boxpl = tp.sum_(tp.relu(d + case.box_margin), axis=1) / length

    raw = {
        "wx_m": (wx1, wx2),
        "di_rad": (di1, di2),
        "lift_required_n": l_req,
        "lift_supplied_n": (l1, l2),
        "spans_m": (w1.span, w2.span),
        "fuselage_length_m": length,
        "signed_distances": d,
        "off_extent_flags": off_flags,
    }
    return tp.stack([c_lift, c_wx, c_di, c_bb, c_boxpl], axis=1), raw


def geometry_layer(aircraft, case):
    """Score a batch: objective plus constraints, counting evaluations."""
    case = get_case(case)
    o_mass, m_wing, m_fus = mass_objective(aircraft, case)
    cons, raw = constraints(aircraft, case, m_wing=m_wing, m_fus=m_fus)
    report = tp.concat([tp.reshape(o_mass, (-1, 1)), cons], axis=1)
    GEOMETRY_EVALS.add(aircraft.batch)
    return GeometryReport(report=report, raw=raw)


_CF_REFERENCE = 0.455 / (np.log10(1.5e6) ** 2.58)  # flat-plate turbulent, fixed Re


def drag(aircraft, velocity, rho):
    """Form plus induced drag (newtons); provided for reporting only.

    Fuselage form drag follows a fineness-ratio correlation
    FF = 1 + 1.5/f^1.5 + 7/f^3 on the wetted area with a fixed turbulent
    flat-plate friction coefficient, so drag scales exactly with dynamic
    pressure.
    """
    q = 0.5 * rho * velocity**2
    fus = aircraft.fuselage
    surf, _ = fus.area_volume()
    f = fus.fineness_ratio()
    ff = 1.0 + 1.5 / f**1.5 + 7.0 / f**3.0
    d_fus = surf * (_CF_REFERENCE * q) * ff
    d_wings = sum(w.induced_drag(velocity, rho) for w in aircraft.wings)
    return d_fus + d_wings


def form_factor_table(fineness_values):
    """Tabulate the implemented fuselage form-factor correlation."""
    f = np.asarray(fineness_values, dtype=np.float64)
    return 1.0 + 1.5 / f**1.5 + 7.0 / f**3.0
