"""Acceptance gate: one group of checks per numbered criterion.

Each test carries ``@pytest.mark.criterion(n)``; the hook in conftest.py
prints a single PASS/FAIL line per criterion at the end of the run.
"""

import math
import time
import timeit

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import chain_by_coordinates
from wheelleg.errors import Unreachable
from wheelleg.gait import SWHEGPRO3, GaitParams, gait_phases, joint_angle, stance_count, swheg_trajectory
from wheelleg.geometry import (
    Pro3ModuleSpec,
    ProModuleSpec,
    pro3_chain,
    pro3_span,
    pro_opening_angle,
    pro_wheel_profile,
    required_span,
    solve_pro_hinge,
    solve_pushrod,
    span_range,
    wheel_profile,
)
from wheelleg.metrics import TelemetryLog, cost_j, max_load, mean_deviation, mean_peak_gap, specific_resistance
from wheelleg.rollout import RolloutConfig, optimize_wheelbase, roll_wheel
from wheelleg.stairs import DESIGN_STAIR, PRESET_SLOPES, PRESETS, Stair, Staircase, slope

PRO = ProModuleSpec()
PRO3 = Pro3ModuleSpec()


# 1 ---------------------------------------------------------------------------


@pytest.mark.criterion(1)
@pytest.mark.parametrize("name", sorted(PRESETS))
def test_preset_slope(name):
    assert abs(slope(PRESETS[name]) - PRESET_SLOPES[name]) < 0.01


@pytest.mark.criterion(1)
def test_slopes_are_fast():
    stairs = list(PRESETS.values())
    per_call = min(timeit.repeat(lambda: [slope(s) for s in stairs], number=200, repeat=5)) / 200
    assert per_call < 1e-3


# 2 ---------------------------------------------------------------------------

POWER_TABLE = [
    (20.475, 0.332, 0.623),
    (13.423, 0.213, 0.638),
    (17.857, 0.287, 0.629),
    (18.640, 0.282, 0.667),
    (15.657, 0.196, 0.808),
    (18.354, 0.249, 0.746),
]


@pytest.mark.criterion(2)
@pytest.mark.parametrize("power,velocity,sr", POWER_TABLE)
def test_specific_resistance(power, velocity, sr):
    assert abs(specific_resistance(power, 10.08, velocity) / sr - 1.0) < 0.005


# 3 ---------------------------------------------------------------------------


@pytest.mark.criterion(3)
def test_max_load():
    assert 26.0 <= max_load(6, 60.0, 10.08) <= 27.0


# 4 ---------------------------------------------------------------------------


@pytest.mark.criterion(4)
def test_required_span_cases():
    assert abs(required_span(PRESETS["C1"], PRO3) - 134.164) < 1e-3
    assert abs(required_span(PRESETS["C1"], PRO3) - 60.0 * math.sqrt(5.0)) < 1e-6
    assert abs(required_span(PRESETS["C2"], PRO3) - 100.0) < 1e-6


# 5 ---------------------------------------------------------------------------


@pytest.mark.criterion(5)
def test_chain_matches_coordinates():
    rng = np.random.default_rng(5)
    worst = 0.0
    for x in rng.uniform(PRO3.rod_min, PRO3.rod_max, 1000):
        got, ref = pro3_chain(PRO3, x), chain_by_coordinates(PRO3, x)
        worst = max(worst, *(abs(getattr(got, k) - ref[k]) for k in ("L4", "L5", "L0", "T")))
    assert worst < 1e-9


@pytest.mark.criterion(5)
def test_pro_circle_residuals():
    ax, ay = PRO.rod_anchor
    worst = 0.0
    for rod in np.linspace(PRO.rod_min, PRO.rod_max, 2001):
        x, y = solve_pro_hinge(PRO, rod)
        worst = max(worst, abs(math.hypot(x, y) - PRO.hinge_radius), abs(math.hypot(x - ax, y - ay) - rod))
    assert worst < 1e-9


# 6 ---------------------------------------------------------------------------


@pytest.mark.criterion(6)
@pytest.mark.parametrize("name", sorted(PRESETS))
def test_pushrod_inversion(name):
    stair = PRESETS[name]
    lo, hi = span_range(PRO3)
    target = required_span(stair, PRO3)
    if lo <= target <= hi:
        assert abs(pro3_span(PRO3, solve_pushrod(PRO3, stair)) - target) < 1e-6
    else:
        with pytest.raises(Unreachable):
            solve_pushrod(PRO3, stair)


@pytest.mark.criterion(6)
def test_unreachable_reports_range():
    with pytest.raises(Unreachable) as exc:
        solve_pushrod(PRO3, Stair(300.0, 900.0))
    lo, hi = span_range(PRO3)
    assert (exc.value.span_min, exc.value.span_max) == pytest.approx((lo, hi))
    assert f"{hi:.6f}" in str(exc.value)


# 7 ---------------------------------------------------------------------------


@pytest.mark.criterion(7)
def test_rod_angle_fit():
    rods = np.linspace(PRO.rod_min, PRO.rod_max, 401)
    ang = np.array([pro_opening_angle(PRO, r) for r in rods])
    fit = np.polyval(np.polyfit(rods, ang, 1), rods)
    assert 1 - np.sum((ang - fit) ** 2) / np.sum((ang - ang.mean()) ** 2) > 0.99


# 8 ---------------------------------------------------------------------------


def _flat():
    return Staircase(DESIGN_STAIR, n_steps=1, lead_in=3000.0, lead_out=100.0)


@pytest.mark.criterion(8)
def test_circle_holds_height():
    a = np.linspace(0, 2 * math.pi, 400, endpoint=False)
    wheel = np.column_stack([120.0 * np.cos(a), 120.0 * np.sin(a)])
    cfg = RolloutConfig(start_x=200.0, max_progress=1500.0)
    y = np.array([p.wheel_center[1] for p in roll_wheel(wheel, _flat(), cfg)])
    assert np.abs(y - 120.0).max() < cfg.contact_tol


@pytest.mark.criterion(8)
def test_leg_mode_height_band():
    leg = pro_wheel_profile(PRO, PRO.rod_max, 64)
    r_max = float(np.hypot(*leg.T).max())
    cfg = RolloutConfig(start_x=200.0, max_progress=2 * math.pi * r_max)
    y = np.array([p.wheel_center[1] for p in roll_wheel(leg, _flat(), cfg)])
    assert y.min() >= 100.0 - 2.0 and y.max() <= 141.0 + 2.0


# 9 ---------------------------------------------------------------------------


@pytest.mark.criterion(9)
def test_wheelbase_optimum():
    start = time.perf_counter()
    profile = wheel_profile(PRO3, PRO3.rod_max, 64)
    res = optimize_wheelbase(SWHEGPRO3, profile, Staircase(DESIGN_STAIR, n_steps=10), (400.0, 650.0), 26)
    elapsed = time.perf_counter() - start
    print(f"optimum {res.wheelbase_mm:.2f} mm, rmse {res.rmse_mm:.3f} mm, {elapsed:.1f} s")
    assert 480.0 <= res.wheelbase_mm <= 540.0
    assert elapsed < 60.0


# 10 --------------------------------------------------------------------------

RHEX = GaitParams(150.0, 210.0, 0.5, 1.0)
SWHEG = GaitParams(60.0, 120.0, 0.3, 1.2, mode="SWheg")


@pytest.mark.criterion(10)
def test_phase_offsets_exact():
    assert gait_phases("tripod").offsets == (0.0, 1 / 2, 0.0, 1 / 2, 0.0, 1 / 2)
    assert gait_phases("ripple").offsets == (0.0, 1 / 3, 2 / 3, 1 / 6, 1 / 2, 5 / 6)


@pytest.mark.criterion(10)
def test_no_drift_over_1000_periods():
    for g in (RHEX, SWHEG):
        for t in np.linspace(0.0, g.T_c, 101):
            assert abs(joint_angle(g, t + 1000 * g.T_c) - joint_angle(g, t) - 360000.0) < 1e-6


@pytest.mark.criterion(10)
@settings(max_examples=1000)
@given(st.floats(min_value=-100.0, max_value=100.0, allow_nan=False))
def test_swheg_half_period(t):
    assert abs(swheg_trajectory(SWHEG, t + SWHEG.T_c / 2) - swheg_trajectory(SWHEG, t) - 180.0) < 1e-9


@pytest.mark.criterion(10)
def test_tripod_support():
    table = gait_phases("tripod")
    assert RHEX.t_s == RHEX.T_c / 2
    assert min(stance_count(RHEX, table, t) for t in np.linspace(0.0, 3.0, 3001)) >= 3


# 11 --------------------------------------------------------------------------

angles = st.floats(min_value=-180.0, max_value=180.0, allow_nan=False)


@st.composite
def logs(draw):
    n = draw(st.integers(5, 60))
    t = np.cumsum(draw(st.lists(st.floats(1e-3, 1.0), min_size=n, max_size=n)))
    j = np.array(draw(st.lists(st.floats(0.0, 60.0), min_size=n, max_size=n)))
    return t, j


def _log(t, j):
    z = np.zeros_like(j)
    return TelemetryLog.from_arrays(t, z, j, z)


@pytest.mark.criterion(11)
@settings(max_examples=1000)
@given(logs(), st.floats(0.0, 20.0))
def test_offset_linearity(data, c):
    t, j = data
    base = mean_deviation(_log(t, j), DESIGN_STAIR)
    assert mean_deviation(_log(t, j + c), DESIGN_STAIR) - base == pytest.approx(c, abs=1e-9)


@st.composite
def cycled_logs(draw):
    """A period and a log sampled at most half a period apart, spanning a cycle."""
    period = draw(st.floats(0.05, 3.0))
    # six samples at least a quarter period apart span more than one cycle
    n = draw(st.integers(6, 60))
    t = np.cumsum(draw(st.lists(st.floats(period / 4, period / 2), min_size=n, max_size=n)))
    j = np.array(draw(st.lists(st.floats(25.0, 85.0), min_size=n, max_size=n)))
    return period, t, j


@pytest.mark.criterion(11)
@settings(max_examples=1000)
@given(cycled_logs(), st.floats(-20.0, 20.0))
def test_peak_gap_constant_invariance(data, c):
    period, t, j = data
    window = (float(t[0]), float(t[0]) + period * int((t[-1] - t[0]) / period))
    ga, na = mean_peak_gap(_log(t, j), period, window)
    gb, nb = mean_peak_gap(_log(t, j + c), period, window)
    assert na == nb >= 1 and gb == pytest.approx(ga, abs=1e-9)


@pytest.mark.criterion(11)
@settings(max_examples=1000)
@given(angles, angles, angles, st.permutations(range(3)), st.tuples(*[st.sampled_from((1, -1))] * 3))
def test_cost_invariance(a, b, c, perm, signs):
    v = (a, b, c)
    w = [signs[i] * v[perm[i]] for i in range(3)]
    assert cost_j(*w) == pytest.approx(cost_j(a, b, c), rel=1e-12, abs=1e-12)
