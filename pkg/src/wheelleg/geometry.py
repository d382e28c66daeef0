"""Planar kinematics of the two transformable wheel modules.

All public lengths are millimetres and all public angles are degrees;
radians only appear internally at trig calls.

Two mechanisms are modeled:

* the two-spoke module (``ProModuleSpec``): a hinge point on a circle about
  the hub is pulled by a push rod anchored on the hub frame, and the hinge
  polar angle is the rim opening angle;
* the curved three-spoke module (``Pro3ModuleSpec``): a chain of triangles
  maps push-rod extension ``x`` to the span ``T(x)`` of the spoke tips.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, fields
from pathlib import Path

import numpy as np
from scipy.optimize import brentq

from .errors import (
    ConfigError,
    DomainError,
    NoSolution,
    OutOfRange,
    OutOfStroke,
    Unreachable,
)
from .stairs import Stair

_DOMAIN_MARGIN = 1e-6


def _cos(deg):
    return math.cos(math.radians(deg))


def _acos_deg(arg, step, x):
    if not -1.0 <= arg <= 1.0:
        raise DomainError(step, arg, x)
    return math.degrees(math.acos(arg))


def _law_of_cosines(a, b, angle_deg):
    # (a - b)^2 + 4ab sin^2(g/2) equals a^2 + b^2 - 2ab cos g without the
    # cancellation that plain form suffers for near-equal sides and small g
    h = math.sin(math.radians(angle_deg) / 2.0)
    return math.sqrt((a - b) ** 2 + 4.0 * a * b * h * h)


# ---------------------------------------------------------------------------
# Two-spoke module
# ---------------------------------------------------------------------------


def hinge_angle(x_a: float, y_a: float) -> float:
    """Uncalibrated opening angle of hinge point ``(x_a, y_a)``, degrees.

    For ``x_a >= 0`` this is ``atan|y/x|``. Past the vertical the angle is
    ``90 + atan|x/y|``, which is continuous with the first branch at
    ``x_a = 0`` (both give 90).
    """
    if x_a >= 0.0:
        if x_a == 0.0:
            return 90.0
        return math.degrees(math.atan(abs(y_a / x_a)))
    if y_a == 0.0:
        return 180.0
    return 90.0 + math.degrees(math.atan(abs(x_a / y_a)))


@dataclass(frozen=True)
class ProModuleSpec:
    """Geometry of the two-spoke (S-leg) module.

    ``theta_fix`` defaults to the value that makes the fully retracted rod
    (``rod_min``) read as zero opening.
    """

    hinge_radius: float = 55.0
    rod_anchor: tuple[float, float] = (98.4, -21.5)
    theta_fix: float | None = None
    rod_min: float = 60.0
    rod_max: float = 140.0
    rim_radius: float = 100.0
    max_radius: float = 130.0
    # leg-mode outline: angular width of a spoke's back flank, degrees
    flank_deg: float = 30.0

    def __post_init__(self):
        object.__setattr__(self, "rod_anchor", tuple(float(v) for v in self.rod_anchor))
        if not self.hinge_radius > 0:
            raise ConfigError("hinge_radius must be positive")
        if not self.rod_min < self.rod_max:
            raise ConfigError("rod_min must be below rod_max")
        if not 0 < self.rim_radius <= self.max_radius:
            raise ConfigError("need 0 < rim_radius <= max_radius")
        for rod in (self.rod_min, self.rod_max):
            _hinge_point(self, rod)
        if self.theta_fix is None:
            x_a, y_a = _hinge_point(self, self.rod_min)
            object.__setattr__(self, "theta_fix", hinge_angle(x_a, y_a))


def _hinge_point(spec: ProModuleSpec, rod_len: float) -> tuple[float, float]:
    ax, ay = spec.rod_anchor
    h = spec.hinge_radius
    d = math.hypot(ax, ay)
    if d == 0.0 or rod_len < abs(d - h) or rod_len > d + h:
        raise NoSolution(f"rod length {rod_len} mm: hinge and rod circles do not intersect")
    # distance from the hub along the hub->anchor axis, and offset across it
    a = (h * h + d * d - rod_len * rod_len) / (2.0 * d)
    off = math.sqrt(max(h * h - a * a, 0.0))
    ux, uy = ax / d, ay / d
    # clockwise of the anchor direction first: it opens continuously through
    # the lower half-plane as the rod extends
    for sign in (1.0, -1.0):
        x_a = a * ux + sign * off * uy
        y_a = a * uy - sign * off * ux
        if y_a < 0.0:
            return x_a, y_a
    raise NoSolution(f"rod length {rod_len} mm: no intersection with y < 0")


def solve_pro_hinge(spec: ProModuleSpec, rod_len: float) -> tuple[float, float]:
    """Hinge point ``(x_A, y_A)`` for a push-rod length.

    Solves ``|A| = hinge_radius``, ``|A - rod_anchor| = rod_len``, ``y_A < 0``.
    Raises ``NoSolution`` for impossible lengths and ``OutOfStroke`` for
    geometrically valid lengths outside the actuator stroke.
    """
    point = _hinge_point(spec, rod_len)
    if not spec.rod_min <= rod_len <= spec.rod_max:
        raise OutOfStroke(f"rod length {rod_len} mm outside stroke [{spec.rod_min}, {spec.rod_max}]")
    return point


def pro_opening_angle(spec: ProModuleSpec, rod_len: float) -> float:
    x_a, y_a = solve_pro_hinge(spec, rod_len)
    return hinge_angle(x_a, y_a) - spec.theta_fix


def pro_rod_for_angle(spec: ProModuleSpec, theta: float) -> float:
    """Push-rod length producing opening angle ``theta`` (degrees)."""
    lo, hi = spec.rod_min, spec.rod_max
    a_lo, a_hi = pro_opening_angle(spec, lo), pro_opening_angle(spec, hi)
    if not a_lo <= theta <= a_hi:
        raise OutOfRange(f"angle {theta} deg outside reachable [{a_lo:.6f}, {a_hi:.6f}]")
    if theta == a_lo:
        return lo
    if theta == a_hi:
        return hi
    return brentq(lambda r: pro_opening_angle(spec, r) - theta, lo, hi, xtol=1e-13, rtol=1e-15)


# ---------------------------------------------------------------------------
# Curved three-spoke module
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ChainState:
    """Every intermediate of the spoke chain at one extension (deg / mm)."""

    x: float
    alpha1: float
    alpha2: float
    alpha3: float
    alpha4: float
    alpha5: float
    alpha6: float
    L4: float
    L5: float
    L0: float
    T: float


def _chain(spec, x):
    a1 = _acos_deg(
        (spec.L1**2 + spec.L2**2 - (spec.rod_base + x) ** 2) / (2.0 * spec.L1 * spec.L2), "alpha1", x
    )
    L4 = _law_of_cosines(spec.L2, spec.L3, a1 + spec.theta2)
    a2 = a1 + spec.theta2 - (180.0 - spec.theta4) / 2.0
    L5 = _law_of_cosines(spec.r1, spec.L3, a2)
    if L5 == 0.0:
        raise DomainError("alpha3", math.nan, x)
    a3 = _acos_deg((L5**2 + spec.r1**2 - L4**2) / (2.0 * spec.r1 * L5), "alpha3", x)
    a4 = a3 - spec.theta3 - spec.theta4
    L0 = _law_of_cosines(spec.r2, L5, a4)
    if L0 == 0.0:
        raise DomainError("alpha5", math.nan, x)
    a5 = _acos_deg((L0**2 + L5**2 - spec.r2**2) / (2.0 * L0 * L5), "alpha5", x)
    a6 = 180.0 - a5 - a4
    # T^2 = 3 L0^2 + 3 r2^2 - 6 r2 L0 cos(a6), evaluated in the stable form
    T = math.sqrt(3.0) * _law_of_cosines(L0, spec.r2, a6)
    return ChainState(x, a1, a2, a3, a4, a5, a6, L4, L5, L0, T)


def _domain_limit(spec, lo):
    """Largest extension above ``lo`` for which the chain stays defined."""

    def ok(x):
        try:
            _chain(spec, x)
            return True
        except DomainError:
            return False

    if not ok(lo):
        raise ConfigError(f"spoke chain undefined at rod_min={lo} mm")
    step = 1.0
    a = lo
    while ok(a + step):
        a += step
        if a - lo > 1e4:
            raise ConfigError("spoke chain has no upper domain limit")
    b = a + step
    while b - a > 1e-12:
        m = 0.5 * (a + b)
        if ok(m):
            a = m
        else:
            b = m
    return a


@dataclass(frozen=True)
class Pro3ModuleSpec:
    """Geometry of the curved three-spoke module.

    ``theta0``, ``theta1`` and ``l`` do not enter the span chain. ``theta0``
    sets the angular width of a spoke's back flank and ``l`` the tip pad
    length in ``wheel_profile``; ``theta1`` is carried for completeness.
    ``rod_max`` defaults to the largest extension keeping every arccos
    argument in [-1, 1], less 1e-6 mm.
    """

    theta0: float = 50.0
    theta1: float = 92.72
    theta2: float = 9.86
    theta3: float = 21.53
    theta4: float = 34.05
    r1: float = 114.0
    r2: float = 124.0
    l: float = 20.0
    L1: float = 116.67
    L2: float = 66.76
    L3: float = 114.0
    L_arc: float = 240.0
    rod_base: float = 105.0
    rod_min: float = 0.0
    rod_max: float | None = None
    rim_radius: float = 120.0
    max_radius: float = 220.0

    def __post_init__(self):
        for name in ("r1", "r2", "l", "L1", "L2", "L3", "L_arc", "rod_base", "rim_radius", "max_radius"):
            if not getattr(self, name) > 0:
                raise ConfigError(f"{name} must be positive")
        if self.max_radius < self.rim_radius:
            raise ConfigError("max_radius must not be below rim_radius")
        limit = _domain_limit(self, self.rod_min)
        if self.rod_max is None:
            object.__setattr__(self, "rod_max", limit - _DOMAIN_MARGIN)
        elif not self.rod_min < self.rod_max <= limit:
            raise ConfigError(
                f"rod_max={self.rod_max} must lie in (rod_min, {limit:.6f}] for this geometry"
            )


def pro3_chain(spec: Pro3ModuleSpec, x: float) -> ChainState:
    """Evaluate the spoke chain at extension ``x`` (mm).

    Order: alpha1, L4, alpha2, L5, alpha3, alpha4, L0, alpha5, alpha6, T.
    alpha6 needs alpha5, so it is evaluated last among the angles.
    Raises ``DomainError`` naming the first arccos that is undefined.
    """
    return _chain(spec, float(x))


def pro3_span(spec: Pro3ModuleSpec, x: float) -> float:
    return _chain(spec, float(x)).T


def required_span(stair: Stair, spec: Pro3ModuleSpec) -> float:
    """Spoke span a stair asks for: ``hypot(H, L - L_arc)``."""
    return math.hypot(stair.height, stair.length - spec.L_arc)


def span_range(spec: Pro3ModuleSpec, n: int = 2001) -> tuple[float, float]:
    xs = np.linspace(spec.rod_min, spec.rod_max, n)
    ts = [pro3_span(spec, x) for x in xs]
    return min(ts), max(ts)


def solve_pushrod(spec: Pro3ModuleSpec, stair: Stair, n_scan: int = 2001) -> float:
    """Smallest extension ``x`` in the stroke with ``T(x) = T_Aim``.

    The stroke is scanned on ``n_scan`` points for the first sign change and
    the bracket is refined with Brent's method.
    """
    target = required_span(stair, spec)
    xs = np.linspace(spec.rod_min, spec.rod_max, n_scan)
    f = np.array([pro3_span(spec, x) for x in xs]) - target
    t_min, t_max = float(f.min() + target), float(f.max() + target)
    if not t_min <= target <= t_max:
        raise Unreachable(target, t_min, t_max)
    zero = np.flatnonzero(f == 0.0)
    change = np.flatnonzero(np.sign(f[:-1]) * np.sign(f[1:]) < 0)
    if zero.size and (not change.size or zero[0] <= change[0]):
        return float(xs[zero[0]])
    i = change[0]
    return brentq(lambda x: pro3_span(spec, x) - target, xs[i], xs[i + 1], xtol=1e-13, rtol=1e-15)


# ---------------------------------------------------------------------------
# Wheel outlines
# ---------------------------------------------------------------------------


def _rot(deg):
    c, s = _cos(deg), math.sin(math.radians(deg))
    return np.array([[c, -s], [s, c]])


def _swung_arc(rim_radius, arc_rad, swing_rad, n):
    """Rim arc starting at (rim_radius, 0), rotated outward about that end."""
    a = np.linspace(0.0, arc_rad, n)
    pts = rim_radius * np.column_stack([np.cos(a) - 1.0, np.sin(a)])
    c, s = math.cos(swing_rad), math.sin(swing_rad)
    pts = pts @ np.array([[c, s], [-s, c]])
    pts[:, 0] += rim_radius
    return pts


def _swing_for_radius(rim_radius, arc_rad, outer_radius):
    def reach(swing):
        return np.hypot(*_swung_arc(rim_radius, arc_rad, swing, 4001).T).max() - outer_radius

    lo = 0.0
    while reach(lo) < 0.0:
        lo -= 0.05
        if lo < -math.pi / 2:
            raise ConfigError(f"spoke cannot reach radius {outer_radius} mm")
    if lo == 0.0:
        return 0.0
    return brentq(reach, lo, min(lo + 0.05, 0.0), xtol=1e-12)


def lobed_profile(
    n_lobes: int,
    rim_radius: float,
    arc_length: float,
    outer_radius: float,
    flank_deg: float,
    pad_length: float,
    samples: int,
) -> np.ndarray:
    """Closed outline of a wheel whose rim segments swing out as spokes.

    Each of the ``n_lobes`` sectors holds one rim arc of length
    ``arc_length`` hinged at one end and swung outward until its farthest
    point sits at ``outer_radius``. Past the tip comes a pad of
    ``pad_length`` at constant radius, a flank dropping linearly (in polar
    angle) to the rim over ``flank_deg``, then bare rim up to the next hinge.
    The arc runs clockwise from its hinge, so when the wheel turns clockwise
    (driving in +x) the flank and tip meet the ground before the hinge.
    The result is star-shaped about the hub, so the polygon is simple.

    Returns ``(n_lobes * samples, 2)`` vertices in counter-clockwise order,
    without repeating the first vertex. Rotating by ``360 / n_lobes`` maps
    the outline onto itself.
    """
    if samples < 16:
        raise ConfigError("need at least 16 samples per spoke")
    if outer_radius < rim_radius:
        raise ConfigError("outer_radius below rim_radius")
    sector = 360.0 / n_lobes
    arc_rad = min(arc_length / rim_radius, math.radians(sector))
    swing = _swing_for_radius(rim_radius, arc_rad, outer_radius) if outer_radius > rim_radius else 0.0

    dense = _swung_arc(rim_radius, arc_rad, swing, 4001)
    radius = np.hypot(*dense.T)
    polar = np.degrees(np.unwrap(np.arctan2(dense[:, 1], dense[:, 0])))
    k_tip = int(np.argmax(radius))
    r_tip = float(radius[k_tip])
    phi_tip = float(polar[k_tip])
    arc_polar, arc_r = polar[: k_tip + 1], radius[: k_tip + 1]
    if np.any(np.diff(arc_polar) <= 0.0):
        raise ConfigError("swung spoke is not star-shaped about the hub")
    if swing == 0.0:
        # closed: the sector is plain rim
        arc_polar = np.array([0.0, phi_tip])
        arc_r = np.array([rim_radius, rim_radius])

    room = sector - phi_tip
    pad = min(math.degrees(pad_length / r_tip), room)
    flank = min(flank_deg, room - pad)
    marks = [phi_tip, phi_tip + pad, phi_tip + pad + flank, sector]

    def r_of(phi):
        phi = np.asarray(phi, dtype=float)
        out = np.full(phi.shape, rim_radius)
        on_arc = phi <= phi_tip
        out[on_arc] = np.interp(phi[on_arc], arc_polar, arc_r)
        on_pad = (phi > marks[0]) & (phi <= marks[1])
        out[on_pad] = r_tip
        on_flank = (phi > marks[1]) & (phi < marks[2])
        if flank > 0:
            w = (phi[on_flank] - marks[1]) / flank
            out[on_flank] = r_tip + (rim_radius - r_tip) * w
        return out

    # spread samples over the four pieces by angular width, keeping breakpoints
    spans = np.array([phi_tip, pad, flank, sector - marks[2]])
    counts = np.maximum(np.floor(samples * spans / sector).astype(int), (spans > 0).astype(int))
    counts[0] += samples - counts.sum()
    starts = [0.0] + marks[:3]
    phi = np.concatenate(
        [start + span * np.arange(c) / c for start, span, c in zip(starts, spans, counts) if c > 0]
    )
    r = r_of(phi)
    # built with the arc counter-clockwise of the hinge, then mirrored
    base = np.column_stack([r * np.cos(np.radians(phi)), -r * np.sin(np.radians(phi))])[::-1]
    return np.vstack([base @ _rot(k * sector).T for k in range(n_lobes)])


def opening_fraction(spec: Pro3ModuleSpec, x: float) -> float:
    """Normalized span ``(T(x) - T(rod_min)) / (T(rod_max) - T(rod_min))``."""
    t0 = pro3_span(spec, spec.rod_min)
    t1 = pro3_span(spec, spec.rod_max)
    return float(np.clip((pro3_span(spec, x) - t0) / (t1 - t0), 0.0, 1.0))


def wheel_profile(spec: Pro3ModuleSpec, x: float, samples: int = 64) -> np.ndarray:
    """Outline of the three-spoke wheel at extension ``x``.

    The spoke tip radius moves from ``rim_radius`` (closed, a circle) to
    ``max_radius`` (fully open) in proportion to the normalized span.
    ``samples`` counts vertices per spoke.
    """
    outer = spec.rim_radius + (spec.max_radius - spec.rim_radius) * opening_fraction(spec, x)
    return lobed_profile(3, spec.rim_radius, spec.L_arc, outer, spec.theta0, spec.l, samples)


def pro_wheel_profile(spec: ProModuleSpec, rod_len: float, samples: int = 64) -> np.ndarray:
    """Outline of the two-spoke wheel at a push-rod length.

    Each half rim swings out as one spoke; tip radius scales with the
    opening angle from ``rim_radius`` (closed) to ``max_radius`` (rod_max).
    """
    full = pro_opening_angle(spec, spec.rod_max)
    frac = float(np.clip(pro_opening_angle(spec, rod_len) / full, 0.0, 1.0))
    outer = spec.rim_radius + (spec.max_radius - spec.rim_radius) * frac
    return lobed_profile(2, spec.rim_radius, math.pi * spec.rim_radius, outer, spec.flank_deg, 0.0, samples)


# ---------------------------------------------------------------------------
# Config files
# ---------------------------------------------------------------------------

_SPEC_TYPES = {"pro": ProModuleSpec, "pro3": Pro3ModuleSpec}


def load_specs(path) -> dict:
    """Read module specs from a JSON file.

    Top-level keys ``"pro"`` and ``"pro3"`` each hold an object whose keys are
    the dataclass field names (mm and degrees). Missing sections or fields take
    the built-in defaults; unknown keys are rejected.
    """
    try:
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise ConfigError(f"spec file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"spec file {path} is not valid JSON: {exc}") from None
    if not isinstance(raw, dict):
        raise ConfigError("spec file must hold a JSON object")
    unknown = set(raw) - set(_SPEC_TYPES)
    if unknown:
        raise ConfigError(f"unknown spec sections: {sorted(unknown)}")
    out = {}
    for key, cls in _SPEC_TYPES.items():
        section = raw.get(key, {})
        names = {f.name for f in fields(cls)}
        bad = set(section) - names
        if bad:
            raise ConfigError(f"unknown keys in [{key}]: {sorted(bad)}")
        try:
            out[key] = cls(**section)
        except TypeError as exc:
            raise ConfigError(str(exc)) from None
    return out


def dump_specs(pro: ProModuleSpec, pro3: Pro3ModuleSpec) -> str:
    return json.dumps({"pro": asdict(pro), "pro3": asdict(pro3)}, indent=2)
