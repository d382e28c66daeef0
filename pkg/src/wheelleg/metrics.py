"""Telemetry ingestion and scalar stability/efficiency metrics.

Angles are degrees throughout. A log's attitude is summarized per sample by
the cost ``J = sqrt(roll^2 + pitch^2 + yaw^2)``; the stair slope is the
reference a perfectly smooth climb would hold.
"""

from __future__ import annotations

import csv
import math
import warnings
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import BadInput, EmptyWindow, NonMonotonicTime, OverloadedWarning, ParseError, TooShort
from .stairs import Stair, slope

G = 9.81  # m/s^2


@dataclass(frozen=True)
class ImuSample:
    t: float
    roll: float
    pitch: float
    yaw: float


@dataclass(frozen=True)
class TelemetryLog:
    """IMU samples with optional power (W) and velocity (m/s) series."""

    samples: tuple[ImuSample, ...]
    power: tuple[float, ...] | None = None
    velocity: tuple[float, ...] | None = None

    def __post_init__(self):
        object.__setattr__(self, "samples", tuple(self.samples))
        if not self.samples:
            raise EmptyWindow("telemetry log has no samples")
        for name in ("power", "velocity"):
            series = getattr(self, name)
            if series is not None:
                series = tuple(float(v) for v in series)
                object.__setattr__(self, name, series)
                if len(series) != len(self.samples):
                    raise BadInput(f"{name} series has {len(series)} values for {len(self.samples)} samples")
        t = self.t
        bad = np.flatnonzero(np.diff(t) <= 0)
        if bad.size:
            raise NonMonotonicTime(f"timestamp {t[bad[0] + 1]!r} does not follow {t[bad[0]]!r}")

    @classmethod
    def from_arrays(cls, t, roll, pitch, yaw, power=None, velocity=None) -> "TelemetryLog":
        samples = tuple(ImuSample(*map(float, row)) for row in zip(t, roll, pitch, yaw))
        return cls(samples, power, velocity)

    @property
    def t(self) -> np.ndarray:
        return np.array([s.t for s in self.samples])

    @property
    def cost(self) -> np.ndarray:
        a = np.array([(s.roll, s.pitch, s.yaw) for s in self.samples])
        return np.sqrt((a**2).sum(axis=1))

    def __len__(self):
        return len(self.samples)


@dataclass(frozen=True)
class StabilityReport:
    mean_deviation: float
    mean_peak_gap: float
    n_cycles: int
    window: tuple[float, float]
    specific_resistance: float | None = None

    def to_dict(self) -> dict:
        return {
            "mean_deviation_deg": self.mean_deviation,
            "mean_peak_gap_deg": self.mean_peak_gap,
            "n_cycles": self.n_cycles,
            "specific_resistance": self.specific_resistance,
            "window_s": list(self.window),
        }


def cost_j(roll: float, pitch: float, yaw: float) -> float:
    """Attitude cost, the Euclidean norm of the three Euler angles."""
    return math.sqrt(roll * roll + pitch * pitch + yaw * yaw)


def default_window(log: TelemetryLog, cycle_period: float | None) -> tuple[float, float]:
    """Whole log, or the log minus its first and last cycle when a period is known."""
    t = log.t
    if cycle_period is None:
        return float(t[0]), float(t[-1])
    return float(t[0] + cycle_period), float(t[-1] - cycle_period)


def _in_window(log, window):
    t = log.t
    lo, hi = window
    mask = (t >= lo) & (t <= hi)
    if not np.any(mask):
        raise EmptyWindow(f"no samples in window [{lo}, {hi}] s")
    return mask


def mean_deviation(
    log: TelemetryLog,
    stair: Stair,
    window: tuple[float, float] | None = None,
    cycle_period: float | None = None,
) -> float:
    """Mean of ``J - S`` over the samples inside ``window`` (inclusive), degrees."""
    if window is None:
        window = default_window(log, cycle_period)
    mask = _in_window(log, window)
    return float(np.mean(log.cost[mask] - slope(stair)))


def mean_peak_gap(
    log: TelemetryLog, cycle_period: float, window: tuple[float, float] | None = None
) -> tuple[float, int]:
    """Mean per-cycle ``max J - min J`` and the number of cycles used.

    The window is cut into consecutive ``cycle_period`` segments from its
    start; a trailing partial segment is ignored. Each segment is half-open
    ``[start, start + period)``.
    """
    if not cycle_period > 0:
        raise BadInput("cycle_period must be positive")
    if window is None:
        window = default_window(log, cycle_period)
    lo, hi = window
    n = int(math.floor((hi - lo) / cycle_period + 1e-9))
    if n < 1:
        raise TooShort(f"window of {hi - lo:g} s holds no full {cycle_period:g} s cycle")
    t, j = log.t, log.cost
    gaps = []
    for k in range(n):
        a = lo + k * cycle_period
        seg = (t >= a) & (t < a + cycle_period)
        if not np.any(seg):
            raise EmptyWindow(f"cycle {k} starting at {a:g} s has no samples")
        gaps.append(j[seg].max() - j[seg].min())
    return float(np.mean(gaps)), n


def specific_resistance(power: float, mass: float, velocity: float) -> float:
    """Dimensionless transport cost ``P / (M g v)``."""
    if not mass > 0:
        raise BadInput(f"mass must be positive, got {mass}")
    if not velocity > 0:
        raise BadInput(f"velocity must be positive, got {velocity}")
    return power / (mass * G * velocity)


def max_load(n_actuators: int, force: float, mass: float) -> float:
    """Theoretical payload ``N F / g - M`` in kg.

    A negative result is returned as is with an ``OverloadedWarning``.
    """
    if n_actuators < 1 or not force > 0 or mass < 0:
        raise BadInput("need n_actuators >= 1, force > 0 and mass >= 0")
    load = n_actuators * force / G - mass
    if load < 0:
        warnings.warn(f"robot exceeds actuator capacity by {-load:.3f} kg", OverloadedWarning, stacklevel=2)
    return load


def stability_report(
    log: TelemetryLog,
    stair: Stair,
    cycle_period: float,
    window: tuple[float, float] | None = None,
    mass: float = 10.08,
) -> StabilityReport:
    """All metrics for one log; SR uses mean power over mean velocity."""
    if window is None:
        window = default_window(log, cycle_period)
    dev = mean_deviation(log, stair, window)
    gap, n = mean_peak_gap(log, cycle_period, window)
    sr = None
    if log.power is not None and log.velocity is not None:
        mask = _in_window(log, window)
        p = float(np.mean(np.array(log.power)[mask]))
        v = float(np.mean(np.array(log.velocity)[mask]))
        sr = specific_resistance(p, mass, v)
    return StabilityReport(dev, gap, n, (float(window[0]), float(window[1])), sr)


# ---------------------------------------------------------------------------
# CSV telemetry
# ---------------------------------------------------------------------------

PITCH_ONLY = "#! pitch-only"
_COLUMNS = ("t", "roll", "pitch", "yaw", "power", "velocity")


def parse_telemetry(path) -> TelemetryLog:
    """Read a telemetry CSV.

    The header names a subset of ``t,roll,pitch,yaw,power,velocity`` in that
    order, with ``t``, ``roll``, ``pitch`` and ``yaw`` required. Lines
    starting with ``#`` are comments, except the directive ``#! pitch-only``
    before the header, which allows ``roll`` and ``yaw`` to be omitted and
    fills them with zero.
    """
    path = Path(path)
    pitch_only = False
    header = None
    t, cols = [], {}
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        for row in reader:
            lineno = reader.line_num
            if not row or not "".join(row).strip():
                continue
            first = row[0].strip()
            if first.startswith("#"):
                if header is None and ",".join(row).strip() == PITCH_ONLY:
                    pitch_only = True
                continue
            if header is None:
                header = [c.strip() for c in row]
                _check_header(header, pitch_only, lineno)
                cols = {name: [] for name in header}
                continue
            if len(row) != len(header):
                raise ParseError(f"expected {len(header)} fields, got {len(row)}", lineno)
            for name, cell in zip(header, row):
                try:
                    value = float(cell)
                except ValueError:
                    raise ParseError(f"{name} value {cell.strip()!r} is not a number", lineno) from None
                if not math.isfinite(value):
                    raise ParseError(f"{name} value {cell.strip()!r} is not finite", lineno)
                cols[name].append(value)
            t = cols["t"]
            if len(t) > 1 and t[-1] <= t[-2]:
                raise NonMonotonicTime(f"timestamp {t[-1]!r} does not follow {t[-2]!r}", lineno)
    if header is None:
        raise ParseError("missing header line")
    if not cols["t"]:
        raise ParseError("no data rows")
    zeros = [0.0] * len(cols["t"])
    return TelemetryLog.from_arrays(
        cols["t"],
        cols.get("roll", zeros),
        cols["pitch"],
        cols.get("yaw", zeros),
        cols.get("power"),
        cols.get("velocity"),
    )


def _check_header(header, pitch_only, lineno):
    unknown = [c for c in header if c not in _COLUMNS]
    if unknown:
        raise ParseError(f"unknown column {unknown[0]!r}", lineno)
    if len(set(header)) != len(header):
        raise ParseError("duplicate column in header", lineno)
    if sorted(header, key=_COLUMNS.index) != header:
        raise ParseError("columns must follow the order t,roll,pitch,yaw,power,velocity", lineno)
    required = ("t", "pitch") if pitch_only else ("t", "roll", "pitch", "yaw")
    missing = [c for c in required if c not in header]
    if missing:
        raise ParseError(f"missing column {missing[0]!r}", lineno)
