"""Operating-condition cases and the standard-atmosphere model.

The shipped case values are project defaults chosen to sit inside the
decoder training envelopes; they are configuration, not ground truth.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field

import numpy as np

G0 = 9.80665  # m/s^2


def isa_density(altitude_m):
    """Troposphere density from the International Standard Atmosphere."""
    t = 288.15 - 0.0065 * np.asarray(altitude_m, dtype=np.float64)
    return 1.225 * (t / 288.15) ** 4.2561


def isa_temperature(altitude_m):
    return 288.15 - 0.0065 * np.asarray(altitude_m, dtype=np.float64)


def speed_of_sound(altitude_m):
    return np.sqrt(1.4 * 287.05 * isa_temperature(altitude_m))


def dynamic_viscosity(altitude_m):
    """Sutherland's law at the ISA temperature."""
    t = isa_temperature(altitude_m)
    return 1.458e-6 * t**1.5 / (t + 110.4)


@dataclass
class CaseConfig:
    name: str = "case1"
    velocity: float = 22.0          # m/s
    altitude: float = 500.0         # m
    cargo_masses: tuple = (6.0, 4.0, 3.0)     # kg
    box_volumes: tuple = (0.020, 0.012, 0.008)  # m^3
    rear_lift_fraction: float = 0.2
    box_margin: float = 0.01        # m, containment safety margin

    def __post_init__(self):
        if self.velocity <= 0 or self.altitude < 0:
            raise ValueError("velocity must be positive and altitude non-negative")
        if len(self.cargo_masses) != 3 or len(self.box_volumes) != 3:
            raise ValueError("cases carry exactly three cargo masses and box volumes")
        if any(m <= 0 for m in self.cargo_masses) or any(v <= 0 for v in self.box_volumes):
            raise ValueError("cargo masses and box volumes must be positive")
        if not 0 < self.rear_lift_fraction <= 1:
            raise ValueError("rear lift fraction must be in (0, 1]")

    @property
    def rho(self):
        return float(isa_density(self.altitude))

    @property
    def total_cargo_mass(self):
        return float(sum(self.cargo_masses))

    def to_json(self):
        d = asdict(self)
        d["cargo_masses"] = list(self.cargo_masses)
        d["box_volumes"] = list(self.box_volumes)
        return json.dumps(d, indent=2, sort_keys=True)

    @classmethod
    def from_json(cls, text):
        d = json.loads(text)
        d["cargo_masses"] = tuple(d["cargo_masses"])
        d["box_volumes"] = tuple(d["box_volumes"])
        return cls(**d)


DEFAULT_CASES = {
    "case1": CaseConfig(),
    "case2": CaseConfig(
        name="case2",
        velocity=18.0,
        altitude=1200.0,
        cargo_masses=(4.0, 4.0, 4.0),
        box_volumes=(0.014, 0.014, 0.014),
    ),
    "case3": CaseConfig(
        name="case3",
        velocity=27.0,
        altitude=200.0,
        cargo_masses=(8.0, 5.0, 2.0),
        box_volumes=(0.024, 0.010, 0.006),
    ),
}


def get_case(name):
    if isinstance(name, CaseConfig):
        return name
    if name not in DEFAULT_CASES:
        raise KeyError(f"unknown case '{name}'; available: {sorted(DEFAULT_CASES)}")
    return DEFAULT_CASES[name]
