"""Stair and staircase modeling.

Coordinates are in millimetres with +x along the direction of travel and +y
up. A staircase ascends in +x; the solid material lies below its profile.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError


@dataclass(frozen=True)
class Stair:
    """One step: tread depth ``length`` and riser ``height`` (mm)."""

    length: float
    height: float

    def __post_init__(self):
        if not (self.length > 0 and self.height > 0):
            raise ConfigError(f"stair dimensions must be positive, got {self.length} x {self.height}")


# Selected test stairs (tread, riser) in mm.
PRESETS = {
    "A1": Stair(260.0, 165.0),
    "A2": Stair(300.0, 150.0),
    "B1": Stair(340.0, 165.0),
    "C1": Stair(300.0, 120.0),
    "C2": Stair(300.0, 80.0),
}

# Reference slope values for the presets, degrees (two decimals).
PRESET_SLOPES = {"A1": 32.42, "A2": 26.57, "B1": 25.89, "C1": 21.80, "C2": 14.93}

DESIGN_STAIR = Stair(300.0, 160.0)


def preset(name: str) -> Stair:
    try:
        return PRESETS[name.upper()]
    except KeyError:
        raise ConfigError(f"unknown stair preset {name!r}; choose from {', '.join(PRESETS)}") from None


class StairClass(enum.Enum):
    A = "A"
    B = "B"
    C = "C"
    OTHER = "Other"


def slope(stair: Stair) -> float:
    """Stair inclination in degrees, ``atan(height / length)``.

    The ratio is riser over tread so that a larger value means a steeper
    flight. The inverted ratio ``atan(L/H)`` is sometimes printed for this
    quantity but does not match tabulated slopes.
    """
    return math.degrees(math.atan2(stair.height, stair.length))


def classify(stair: Stair) -> StairClass:
    """Civil-stair type.

    A: L in [240, 300], H in [135, 165]
    B: L in (300, 450], H in [135, 165]
    C: L in [240, 300], H in [80, 135)
    Boundaries are closed so that the 300 mm tread design case is classified.
    """
    L, H = stair.length, stair.height
    tread_ac = 240.0 <= L <= 300.0
    tread_b = 300.0 < L <= 450.0
    tall = 135.0 <= H <= 165.0
    low = 80.0 <= H < 135.0
    if tread_ac and tall:
        return StairClass.A
    if tread_b and tall:
        return StairClass.B
    if tread_ac and low:
        return StairClass.C
    return StairClass.OTHER


@dataclass(frozen=True)
class Staircase:
    """``n_steps`` identical steps with flat ground before and after."""

    step: Stair
    n_steps: int = 8
    lead_in: float = 400.0
    lead_out: float = 400.0

    def __post_init__(self):
        if self.n_steps < 1:
            raise ConfigError("staircase needs at least one step")
        if self.lead_in < 0 or self.lead_out < 0:
            raise ConfigError("lead-in and lead-out must be nonnegative")

    @property
    def first_riser_x(self) -> float:
        return self.lead_in

    @property
    def last_riser_x(self) -> float:
        return self.lead_in + (self.n_steps - 1) * self.step.length

    @property
    def horizontal_extent(self) -> float:
        return self.lead_in + self.n_steps * self.step.length + self.lead_out

    @property
    def total_rise(self) -> float:
        return self.n_steps * self.step.height


def staircase_profile(sc: Staircase) -> np.ndarray:
    """Rectilinear profile vertices, shape ``(2 * n_steps + 2, 2)``.

    Starts at the origin, climbs each riser at ``lead_in + k * L`` and ends
    ``lead_out`` beyond the last full tread. Zero-length segments appear when
    ``lead_in`` is zero; consumers must tolerate them.
    """
    L, H = sc.step.length, sc.step.height
    pts = [(0.0, 0.0)]
    for k in range(sc.n_steps):
        x = sc.lead_in + k * L
        pts.append((x, k * H))
        pts.append((x, (k + 1) * H))
    pts.append((sc.horizontal_extent, sc.n_steps * H))
    return np.asarray(pts, dtype=float)
