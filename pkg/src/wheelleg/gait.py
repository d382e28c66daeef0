"""Wheeled-mode differential drive and legged-mode clock-driven gaits.

Joint trajectories are pure functions of time: any sampler may query any
instant. Angles are degrees and unwrapped, so a leg that has turned two full
revolutions reads 720 more than at the start.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from .errors import BadParams, ConfigError, StraightLine, UnknownGait

LEGS = ("RF", "RM", "RR", "LF", "LM", "LR")


@dataclass(frozen=True)
class ChassisSpec:
    """Robot body constants in SI units (m, kg, N)."""

    width: float
    wheel_radius: float
    reduction: float = 1.0
    wheel_count: int = 6
    mass: float = 10.08
    actuator_force: float = 60.0
    wheelbase: float = 0.21

    def __post_init__(self):
        for name in ("width", "wheel_radius", "reduction", "mass", "actuator_force", "wheelbase"):
            if not getattr(self, name) > 0:
                raise ConfigError(f"chassis {name} must be positive")
        if self.wheel_count not in (4, 6):
            raise ConfigError("wheel_count must be 4 or 6")


# Leg-to-leg width, rim radius, total mass and hip-to-hip length of the two robots.
SWHEGPRO = ChassisSpec(width=0.33, wheel_radius=0.10, wheel_count=6, mass=10.08, wheelbase=0.21)
SWHEGPRO3 = ChassisSpec(width=0.43, wheel_radius=0.12, wheel_count=4, mass=17.65, wheelbase=0.51)


def turning_radius(v: float, w: float) -> float:
    """Instantaneous turning radius ``v / w`` (m); raises ``StraightLine`` for w = 0."""
    if w == 0:
        raise StraightLine("yaw rate is zero; the robot drives straight")
    return v / w


def side_velocities(v: float, w: float, chassis: ChassisSpec) -> tuple[float, float]:
    """Joint angular velocities ``(w_left, w_right)`` in rad/s for a body twist."""
    k = chassis.wheel_radius * chassis.reduction
    half = w * chassis.width / 2.0
    return (v - half) / k, (v + half) / k


class GaitMode(enum.Enum):
    RHEX = "RHex"
    SWHEG = "SWheg"
    WHEELED = "Wheeled"


@dataclass(frozen=True)
class GaitParams:
    """Clock-driven trajectory settings.

    The slow band ``[theta_s, theta_f]`` (touch-down to lift-off, degrees) is
    swept in ``t_s`` seconds out of a ``T_c``-second period.
    """

    theta_s: float
    theta_f: float
    t_s: float
    T_c: float
    mode: GaitMode = GaitMode.RHEX

    def __post_init__(self):
        object.__setattr__(self, "mode", GaitMode(self.mode))
        if not 0 <= self.theta_s < self.theta_f < 360:
            raise BadParams("need 0 <= theta_s < theta_f < 360")
        if not 0 < self.t_s < self.T_c:
            raise BadParams("need 0 < t_s < T_c")


def _two_slope(tau, theta_s, theta_f, t_s, period, turn):
    """One cycle of a slow/fast piecewise-linear clock, ``tau`` in [0, period)."""
    if tau < t_s:
        return theta_s + (theta_f - theta_s) * tau / t_s
    fast = turn - (theta_f - theta_s)
    return theta_f + fast * (tau - t_s) / (period - t_s)


def _cycle(t, period):
    k = math.floor(t / period)
    tau = t - k * period
    if tau >= period:  # t / period rounded down across a boundary
        k += 1
        tau -= period
    return k, max(tau, 0.0)


def rhex_trajectory(g: GaitParams, t: float) -> float:
    """RHex-mode joint angle at time ``t`` (s).

    Starts at ``theta_s``, reaches ``theta_f`` at ``t_s`` and completes the
    remaining ``360 - (theta_f - theta_s)`` degrees by ``T_c``.
    """
    if g.mode is not GaitMode.RHEX:
        raise BadParams(f"rhex_trajectory needs RHex mode, got {g.mode.value}")
    k, tau = _cycle(t, g.T_c)
    return 360.0 * k + _two_slope(tau, g.theta_s, g.theta_f, g.t_s, g.T_c, 360.0)


def _check_swheg(g):
    if g.theta_f - g.theta_s >= 180.0:
        raise BadParams("SWheg slow band must be narrower than 180 deg")
    if g.t_s >= g.T_c / 2.0:
        raise BadParams("SWheg stance time must be shorter than half a period")


def swheg_trajectory(g: GaitParams, t: float) -> float:
    """SWheg-mode joint angle: the two-spoke leg repeats every half turn.

    Each half period sweeps the slow band in ``t_s`` and the rest of the
    half turn in ``T_c / 2 - t_s``, so ``theta(t + T_c/2) = theta(t) + 180``.
    """
    if g.mode is not GaitMode.SWHEG:
        raise BadParams(f"swheg_trajectory needs SWheg mode, got {g.mode.value}")
    _check_swheg(g)
    half = g.T_c / 2.0
    k, tau = _cycle(t, half)
    return 180.0 * k + _two_slope(tau, g.theta_s, g.theta_f, g.t_s, half, 180.0)


def joint_angle(g: GaitParams, t: float) -> float:
    if g.mode is GaitMode.RHEX:
        return rhex_trajectory(g, t)
    if g.mode is GaitMode.SWHEG:
        return swheg_trajectory(g, t)
    raise BadParams("wheeled mode is velocity-driven; use side_velocities")


@dataclass(frozen=True)
class GaitTable:
    """Per-leg phase offsets as fractions of ``T_c``, in ``LEGS`` order."""

    name: str
    offsets: tuple[float, ...]

    def offset(self, leg: str) -> float:
        return self.offsets[LEGS.index(leg)]


_PHASES = {
    "tripod": (0.0, 1 / 2, 0.0, 1 / 2, 0.0, 1 / 2),
    "ripple": (0.0, 1 / 3, 2 / 3, 1 / 6, 1 / 2, 5 / 6),
}


def gait_phases(name: str) -> GaitTable:
    try:
        return GaitTable(name, _PHASES[name.lower()])
    except KeyError:
        raise UnknownGait(f"unknown gait {name!r}; known: {', '.join(_PHASES)}") from None


def leg_angle(g: GaitParams, table: GaitTable, leg: str, t: float) -> float:
    """Angle of one leg: the base trajectory shifted by the leg's phase offset.

    Offsets are fractions of ``T_c`` in both legged modes. In SWheg mode an
    offset of ``T_c / 2`` is a 180 deg turn, which brings the other spoke of
    the S-leg to the same place, so such legs move in step.
    """
    return joint_angle(g, t + table.offset(leg) * g.T_c)


def stance_count(g: GaitParams, table: GaitTable, t: float) -> int:
    """Legs whose wrapped angle lies in the stance band ``[theta_s, theta_f]``.

    A leg is taken to be on the ground while its angle is inside the slow
    band. In SWheg mode either spoke may be down, so angles wrap at 180.
    """
    wrap = 180.0 if g.mode is GaitMode.SWHEG else 360.0
    count = 0
    for leg in LEGS:
        a = (leg_angle(g, table, leg, t) - g.theta_s) % wrap
        if a <= g.theta_f - g.theta_s:
            count += 1
    return count
