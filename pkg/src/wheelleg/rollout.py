"""No-slip kinematic rollout of rigid wheel outlines over a staircase.

The wheel is driven clockwise (travel toward +x). At every instant it
pivots, without slipping, about a single contact point: either one of its
own outline vertices resting on the terrain or a terrain corner (a stair
nose) resting against one of its edges. Rotation continues about that point
until some other part of the wheel touches the terrain; the exact touch
angle is located by root finding on the signed clearance, and the pivot
passes to whichever contact lets rotation continue without penetration.
Rolling on a tread is thus a chain of vertex pivots and climbing a nose is a
single pivot about the nose.

The body model follows the usual assumption that every wheel traces the same
center path: front and rear hubs are placed on that path one wheelbase apart.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from .errors import AllStuck, ConfigError, Stuck, TooShort
from .gait import ChassisSpec
from .stairs import Staircase, slope, staircase_profile

# penetration below this depth (mm) counts as touching, not overlapping
_PEN_EPS = 1e-9
# features closer than this (mm) after an event are treated as contacts
_CONTACT_EPS = 1e-6
_TRIAL_ROT = 1e-5
_TRIAL_EPS = 1e-7


@dataclass(frozen=True)
class RolloutConfig:
    """Integration settings.

    ``max_progress`` of None rolls to the top landing. ``start_x`` places the
    hub at the start; None puts the wheel 50 mm short of the first riser.
    """

    step_ds: float = 2.0
    contact_tol: float = 0.5
    max_progress: float | None = None
    start_x: float | None = None

    def __post_init__(self):
        if not self.step_ds > 0:
            raise ConfigError("step_ds must be positive")
        if not self.contact_tol > 0:
            raise ConfigError("contact_tol must be positive")
        if self.max_progress is not None and not self.max_progress > 0:
            raise ConfigError("max_progress must be positive")


@dataclass(frozen=True)
class PoseSample:
    """Wheel state after ``s`` mm of progress.

    ``s`` is the drive rotation times the outline's largest radius;
    ``joint_angle`` is the accumulated clockwise drive rotation in degrees.
    ``pivot`` is the world contact point the wheel was turning about at the
    end of the step and ``contact_radius`` its distance from the hub.
    """

    s: float
    wheel_center: tuple[float, float]
    joint_angle: float
    pivot: tuple[float, float] = (math.nan, math.nan)
    contact_radius: float = math.nan
    clearance: float = 0.0


@dataclass(frozen=True)
class BodySample:
    """Chassis state. Angles in degrees; ``pitch`` is nose-up positive."""

    s: float
    body_center: tuple[float, float]
    pitch: float
    front_angle: float
    rear_angle: float
    front_center: tuple[float, float]
    rear_center: tuple[float, float]

    @property
    def phase_difference(self) -> float:
        return self.front_angle - self.rear_angle


# ---------------------------------------------------------------------------
# contact geometry
# ---------------------------------------------------------------------------


def _seg_dist(points, a, b):
    """Distances from each point to each segment, shape (n_points, n_segments)."""
    ab = b - a
    ll = np.einsum("ij,ij->i", ab, ab)
    ll = np.where(ll == 0.0, 1.0, ll)
    ap = points[:, None, :] - a[None, :, :]
    t = np.clip(np.einsum("nmj,mj->nm", ap, ab) / ll, 0.0, 1.0)
    proj = a[None, :, :] + t[..., None] * ab[None, :, :]
    return np.hypot(points[:, None, 0] - proj[..., 0], points[:, None, 1] - proj[..., 1])


def _inside_polygon(points, poly):
    x1, y1 = poly[:, 0], poly[:, 1]
    x2, y2 = np.roll(x1, -1), np.roll(y1, -1)
    px, py = points[:, 0:1], points[:, 1:2]
    crosses = (y1 > py) != (y2 > py)
    with np.errstate(divide="ignore", invalid="ignore"):
        x_int = x1 + (py - y1) * (x2 - x1) / (y2 - y1)
    return (np.count_nonzero(crosses & (px < x_int), axis=1) % 2) == 1


class _Terrain:
    def __init__(self, sc: Staircase):
        self.sc = sc
        prof = staircase_profile(sc)
        keep = np.ones(len(prof), dtype=bool)
        keep[1:] = np.any(np.diff(prof, axis=0) != 0.0, axis=1)
        prof = prof[keep]
        self.vertices = prof
        far = 1e7
        ext = np.vstack([[prof[0, 0] - far, prof[0, 1]], prof, [prof[-1, 0] + far, prof[-1, 1]]])
        self.seg_a = ext[:-1]
        self.seg_b = ext[1:]
        self.risers = sc.lead_in + sc.step.length * np.arange(sc.n_steps)

    def height(self, x):
        k = np.searchsorted(self.risers, x, side="right")
        return k * self.sc.step.height

    def signed_distance(self, points, lo, hi):
        near = (np.maximum(self.seg_a[:, 0], self.seg_b[:, 0]) >= lo) & (
            np.minimum(self.seg_a[:, 0], self.seg_b[:, 0]) <= hi
        )
        d = _seg_dist(points, self.seg_a[near], self.seg_b[near]).min(axis=1)
        solid = points[:, 1] < self.height(points[:, 0])
        return np.where(solid, -d, d)


def _rotator(a):
    c, s = math.cos(a), math.sin(a)
    return np.array([[c, -s], [s, c]])


class _Wheel:
    """Outline in the hub frame plus a world pose (center, orientation)."""

    def __init__(self, profile):
        self.local = np.asarray(profile, dtype=float)
        self.r_max = float(np.hypot(*self.local.T).max())
        self.n = len(self.local)

    def world(self, center, phi):
        return center + self.local @ _rotator(phi).T


def _features(terrain, wheel, center, phi):
    """Signed clearance of every contact feature.

    Returns (wheel-vertex clearances, terrain-vertex clearances). A terrain
    vertex inside the outline has negative clearance.
    """
    w = wheel.world(center, phi)
    lo = center[0] - wheel.r_max - 1.0
    hi = center[0] + wheel.r_max + 1.0
    dw = terrain.signed_distance(w, lo, hi)
    tv = terrain.vertices
    near = (tv[:, 0] >= lo) & (tv[:, 0] <= hi) & (np.abs(tv[:, 1] - center[1]) <= wheel.r_max + 1.0)
    dt = np.full(len(tv), np.inf)
    if np.any(near):
        q = tv[near]
        d = _seg_dist(q, w, np.roll(w, -1, axis=0)).min(axis=1)
        dt[near] = np.where(_inside_polygon(q, w), -d, d)
    return dw, dt


def _min_excluding(dw, dt, feature):
    kind, idx = feature
    if kind == "w":
        dw = dw.copy()
        dw[idx] = np.inf
    else:
        dt = dt.copy()
        dt[idx] = np.inf
    return min(dw.min(), dt.min())


def _pivot_point(terrain, wheel, center, phi, feature):
    kind, idx = feature
    if kind == "w":
        return wheel.world(center, phi)[idx]
    return terrain.vertices[idx].copy()


def _turn(center, phi, pivot, a):
    """Rotate the pose clockwise by ``a`` radians about ``pivot``."""
    rot = _rotator(-a)
    return pivot + rot @ (center - pivot), phi - a


# ---------------------------------------------------------------------------
# rollout
# ---------------------------------------------------------------------------


def _initial_pose(wheel, sc, start_x):
    x0 = max(0.0, sc.lead_in - wheel.r_max - 50.0) if start_x is None else start_x
    low = wheel.local[:, 1].min()
    ties = np.flatnonzero(wheel.local[:, 1] <= low + 1e-9)
    start = int(ties[np.argmax(wheel.local[ties, 0])])
    return np.array([x0, -low]), 0.0, ("w", start)


def _choose_pivot(terrain, wheel, center, phi, candidates):
    ordered = sorted(
        candidates, key=lambda f: -_pivot_point(terrain, wheel, center, phi, f)[0]
    )
    for feat in ordered:
        p = _pivot_point(terrain, wheel, center, phi, feat)
        c2, phi2 = _turn(center, phi, p, _TRIAL_ROT)
        dw, dt = _features(terrain, wheel, c2, phi2)
        if _min_excluding(dw, dt, feat) >= -_TRIAL_EPS:
            return feat
    return None


def roll_wheel(profile, sc: Staircase, cfg: RolloutConfig = RolloutConfig()) -> list[PoseSample]:
    """Roll ``profile`` (a closed hub-frame outline, mm) up ``sc``.

    Samples are taken every ``cfg.step_ds`` mm of progress. Rolling stops at
    ``cfg.max_progress`` or once the hub is one wheel radius short of the end
    of the top landing. Raises ``Stuck`` if the wheel jams or turns a full
    revolution without moving forward.
    """
    wheel = _Wheel(profile)
    terrain = _Terrain(sc)
    dphi = cfg.step_ds / wheel.r_max
    x_end = sc.horizontal_extent - wheel.r_max
    center, phi, pivot = _initial_pose(wheel, sc, cfg.start_x)
    p = _pivot_point(terrain, wheel, center, phi, pivot)
    samples = [PoseSample(0.0, tuple(center), 0.0, tuple(p), float(np.hypot(*(center - p))))]
    best_x, turned_since = center[0], 0.0
    k = 0
    while True:
        k += 1
        remaining = dphi
        events = 0
        while remaining > 0.0:
            p = _pivot_point(terrain, wheel, center, phi, pivot)
            c_try, phi_try = _turn(center, phi, p, remaining)
            dw, dt = _features(terrain, wheel, c_try, phi_try)
            if _min_excluding(dw, dt, pivot) >= -2.0 * _PEN_EPS:
                center, phi, remaining = c_try, phi_try, 0.0
                break
            # track only what overlaps at the trial angle; touching features
            # that separate must not trigger the event at zero rotation
            hit_w = dw < -2.0 * _PEN_EPS
            hit_t = dt < -2.0 * _PEN_EPS
            if pivot[0] == "w":
                hit_w[pivot[1]] = False
            else:
                hit_t[pivot[1]] = False

            def gap(a):
                c2, phi2 = _turn(center, phi, p, a)
                gw, gt = _features(terrain, wheel, c2, phi2)
                return min(gw[hit_w].min(initial=np.inf), gt[hit_t].min(initial=np.inf)) + _PEN_EPS

            a = 0.0 if gap(0.0) <= 0.0 else brentq(gap, 0.0, remaining, xtol=1e-15, rtol=1e-15)
            center, phi = _turn(center, phi, p, a)
            remaining -= a
            dw, dt = _features(terrain, wheel, center, phi)
            contacts = {pivot}
            contacts.update(("w", int(i)) for i in np.flatnonzero(dw <= _CONTACT_EPS))
            contacts.update(("t", int(i)) for i in np.flatnonzero(dt <= _CONTACT_EPS))
            new = _choose_pivot(terrain, wheel, center, phi, contacts)
            if new is None:
                raise Stuck(f"wheel jammed at x={center[0]:.3f} mm", samples[-1])
            pivot = new
            events += 1
            if events > 10 * wheel.n:
                raise Stuck(f"no progress resolving contacts at x={center[0]:.3f} mm", samples[-1])
        p = _pivot_point(terrain, wheel, center, phi, pivot)
        dw, dt = _features(terrain, wheel, center, phi)
        s = k * cfg.step_ds
        samples.append(
            PoseSample(
                s,
                (float(center[0]), float(center[1])),
                math.degrees(-phi),
                (float(p[0]), float(p[1])),
                float(np.hypot(*(center - p))),
                float(min(dw.min(), dt.min())),
            )
        )
        if center[0] > best_x + 1e-9:
            best_x, turned_since = center[0], 0.0
        else:
            turned_since += dphi
            if turned_since >= 2.0 * math.pi:
                raise Stuck(f"no forward progress over a full revolution at x={center[0]:.3f} mm", samples[-1])
        if cfg.max_progress is not None and s >= cfg.max_progress:
            break
        if center[0] >= x_end:
            break
    return samples


# ---------------------------------------------------------------------------
# body and wheelbase
# ---------------------------------------------------------------------------


def _path_arrays(poses):
    c = np.array([p.wheel_center for p in poses])
    th = np.array([p.joint_angle for p in poses])
    s = np.array([p.s for p in poses])
    return c, th, s


def body_from_path(poses, wheelbase_mm: float) -> list[BodySample]:
    """Place front and rear hubs on one center path, ``wheelbase_mm`` apart.

    For each front sample the rear hub is the nearest earlier path point at
    exactly that straight-line distance (linear interpolation between path
    samples). Samples whose rear hub would fall before the path start are
    dropped.
    """
    if not wheelbase_mm > 0:
        raise ConfigError("wheelbase must be positive")
    c, th, s = _path_arrays(poses)
    step_len = np.hypot(*np.diff(c, axis=0).T)
    window = int(4 * wheelbase_mm / max(np.median(step_len), 1e-9)) + 8
    out = []
    for i in range(1, len(c)):
        j0 = max(0, i - window)
        d = np.hypot(*(c[j0:i] - c[i]).T)
        far = np.flatnonzero(d >= wheelbase_mm)
        if far.size == 0:
            continue
        j = j0 + int(far[-1])
        # |c_j + t (c_{j+1} - c_j) - c_i| = wb on the segment j -> j+1; the
        # distance falls through wb there, so the crossing is the smaller root
        a, b = c[j], c[j + 1]
        ab, ai = b - a, a - c[i]
        qa = ab @ ab
        qb = 2.0 * ab @ ai
        qc = ai @ ai - wheelbase_mm**2
        disc = max(qb * qb - 4.0 * qa * qc, 0.0)
        t = 0.0 if qa == 0.0 else float(np.clip((-qb - math.sqrt(disc)) / (2.0 * qa), 0.0, 1.0))
        rear = a + t * ab
        rear_angle = th[j] + t * (th[j + 1] - th[j])
        front = c[i]
        mid = 0.5 * (front + rear)
        pitch = math.degrees(math.atan2(front[1] - rear[1], front[0] - rear[0]))
        out.append(
            BodySample(
                float(s[i]),
                (float(mid[0]), float(mid[1])),
                pitch,
                float(th[i]),
                float(rear_angle),
                (float(front[0]), float(front[1])),
                (float(rear[0]), float(rear[1])),
            )
        )
    return out


def body_rollout(chassis: ChassisSpec, profile, sc: Staircase, cfg: RolloutConfig = RolloutConfig()) -> list[BodySample]:
    """Chassis pose sequence for a two-axle robot climbing ``sc``.

    ``chassis.wheelbase`` is in metres, like the rest of ``ChassisSpec``.
    """
    if not chassis.wheelbase > 0:
        raise ConfigError("wheelbase must be positive")
    return body_from_path(roll_wheel(profile, sc, cfg), chassis.wheelbase * 1000.0)


def steady_window(body, sc: Staircase):
    """Indices of steady-climb samples spanning a whole number of steps.

    Steady means both hubs are over the flight (rear past the first riser,
    front not past the last). The first and last full step of that stretch
    are dropped. Returns (indices, n_periods).
    """
    L = sc.step.length
    bx = np.array([b.body_center[0] for b in body])
    rx = np.array([b.rear_center[0] for b in body])
    fx = np.array([b.front_center[0] for b in body])
    on = (rx >= sc.first_riser_x) & (fx <= sc.last_riser_x)
    if not np.any(on):
        raise TooShort("no sample has both hubs over the flight")
    x0, x1 = bx[on].min(), bx[on].max()
    n_periods = int(math.floor((x1 - x0) / L + 1e-9)) - 2
    if n_periods < 3:
        raise TooShort(f"steady climb covers {max(n_periods, 0)} full steps after trimming; need 3")
    lo, hi = x0 + L, x0 + L + n_periods * L
    idx = np.flatnonzero(on & (bx >= lo) & (bx < hi))
    return idx, n_periods


def trajectory_rmse(body, sc: Staircase) -> float:
    """RMS perpendicular distance of the body center from the stair line.

    The reference line has the stair slope and passes through the mean of the
    steady samples (the least-squares intercept for a fixed slope).
    """
    idx, _ = steady_window(body, sc)
    pts = np.array([body[i].body_center for i in idx])
    ang = math.radians(slope(sc.step))
    e = -math.sin(ang) * pts[:, 0] + math.cos(ang) * pts[:, 1]
    return float(np.sqrt(np.mean((e - e.mean()) ** 2)))


@dataclass(frozen=True)
class WheelbaseResult:
    wheelbase_mm: float
    rmse_mm: float
    sweep: list[tuple[float, float]]
    grid_best_mm: float


def optimize_wheelbase(
    chassis_template: ChassisSpec,
    profile,
    sc: Staircase,
    wb_range: tuple[float, float] = (400.0, 650.0),
    grid: int = 26,
    cfg: RolloutConfig = RolloutConfig(),
) -> WheelbaseResult:
    """Wheelbase minimizing trajectory RMSE on ``sc``.

    Every wheel follows the same path, so the wheel is rolled once and each
    candidate only re-places the axles. The grid minimum is refined by golden
    section over its neighbouring grid interval to 1 mm. Candidates that raise
    ``TooShort`` appear in the sweep with a NaN RMSE; if none succeeds,
    ``AllStuck`` is raised.
    """
    lo, hi = map(float, wb_range)
    if grid < 10:
        raise ConfigError("grid must have at least 10 points")
    if not 0 < lo < hi < 2 * sc.horizontal_extent:
        raise ConfigError(f"wheelbase range must lie in (0, {2 * sc.horizontal_extent}) mm")
    poses = roll_wheel(profile, sc, cfg)

    def cost(wb):
        return trajectory_rmse(body_from_path(poses, wb), sc)

    xs = np.linspace(lo, hi, grid)
    sweep = []
    for wb in xs:
        try:
            sweep.append((float(wb), cost(wb)))
        except TooShort:
            sweep.append((float(wb), math.nan))
    vals = np.array([v for _, v in sweep])
    if np.all(np.isnan(vals)):
        raise AllStuck("no wheelbase candidate produced a steady climb")
    k = int(np.nanargmin(vals))
    best_x, best_f = float(xs[k]), float(vals[k])
    if 0 < k < grid - 1 and vals[k - 1] > best_f and vals[k + 1] > best_f:
        a, c = float(xs[k - 1]), float(xs[k + 1])
        # golden's xtol is relative to the bracket magnitude
        res = minimize_scalar(
            cost, bracket=(a, best_x, c), method="golden", options={"xtol": 1.0 / (abs(a) + abs(c))}
        )
        if a <= res.x <= c and res.fun <= best_f:
            best_x, best_f = float(res.x), float(res.fun)
    return WheelbaseResult(best_x, best_f, sweep, float(xs[k]))


def default_chassis_for(chassis: ChassisSpec, wheelbase_mm: float) -> ChassisSpec:
    return replace(chassis, wheelbase=wheelbase_mm / 1000.0)
