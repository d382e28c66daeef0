"""Command-line front end.

Every command writes its result under ``--out`` (default: the current
directory) and echoes JSON results to stdout. Output files start with one
provenance comment line naming the tool version, the command line and a
digest of each input file.

Exit codes: 0 success, 2 configuration, 3 geometry, 4 rollout stuck,
5 telemetry parse error.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import shlex
import sys
from dataclasses import asdict
from pathlib import Path

import numpy as np

from . import __version__
from .errors import (
    BadInput,
    ConfigError,
    EmptyWindow,
    GeometryError,
    ParseError,
    RolloutError,
    TooShort,
    Unreachable,
)
from .gait import LEGS, SWHEGPRO, SWHEGPRO3, GaitParams, gait_phases, leg_angle
from .geometry import (
    Pro3ModuleSpec,
    ProModuleSpec,
    load_specs,
    pro3_chain,
    pro3_span,
    pro_opening_angle,
    pro_rod_for_angle,
    pro_wheel_profile,
    required_span,
    solve_pro_hinge,
    solve_pushrod,
    wheel_profile,
)
from .metrics import parse_telemetry, stability_report
from .rollout import RolloutConfig, body_from_path, optimize_wheelbase, roll_wheel
from .stairs import DESIGN_STAIR, PRESETS, Stair, Staircase, classify, preset, slope, staircase_profile
from .svg import line_plot

EXIT_OK, EXIT_CONFIG, EXIT_GEOMETRY, EXIT_STUCK, EXIT_PARSE = 0, 2, 3, 4, 5

# reference optimum for the design stair and the band accepted around it
REFERENCE_WHEELBASE_MM = 510.0
REFERENCE_BAND_MM = (480.0, 540.0)


def _digest(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()[:16]


class _Run:
    """Shared state for one invocation: inputs, output directory, provenance."""

    def __init__(self, args, argv):
        self.args = args
        self.out = Path(args.out)
        self.inputs = {}
        specs = {"pro": ProModuleSpec(), "pro3": Pro3ModuleSpec()}
        if args.spec is not None:
            if not Path(args.spec).is_file():
                raise ConfigError(f"spec file not found: {args.spec}")
            self.inputs["spec"] = _digest(args.spec)
            specs = load_specs(args.spec)
        self.pro, self.pro3 = specs["pro"], specs["pro3"]
        self.command = shlex.join(["wheelleg", *argv])

    def provenance(self) -> str:
        inputs = ", ".join(f"{k}=sha256:{v}" for k, v in sorted(self.inputs.items())) or "none"
        return f"wheelleg {__version__}; command: {self.command}; inputs: {inputs}"

    def _path(self, name):
        try:
            self.out.mkdir(parents=True, exist_ok=True)
        except OSError as exc:
            raise ConfigError(f"cannot create output directory {self.out}: {exc}") from None
        return self.out / name

    def write_json(self, name, payload):
        text = json.dumps(payload, indent=2, sort_keys=True)
        self._path(name).write_text(f"# {self.provenance()}\n{text}\n", encoding="utf-8")
        print(text)

    def write_csv(self, name, header, rows, notes=()):
        lines = [f"# {self.provenance()}", *(f"# {n}" for n in notes), ",".join(header)]
        lines += [",".join(_fmt(v) for v in row) for row in rows]
        path = self._path(name)
        path.write_text("\n".join(lines) + "\n", encoding="utf-8")
        print(f"wrote {path}")

    def write_svg(self, name, *args, **kw):
        path = self._path(name)
        path.write_text(line_plot(*args, comment=self.provenance(), **kw), encoding="utf-8")
        print(f"wrote {path}")


def _fmt(v):
    if isinstance(v, str):
        return v
    if isinstance(v, (int, np.integer)):
        return str(v)
    return f"{v:.6f}"


def _stair(args) -> Stair:
    dims = (args.stair_length, args.stair_height)
    if args.preset is not None:
        if any(d is not None for d in dims):
            raise ConfigError("give either --preset or --stair-length/--stair-height, not both")
        return preset(args.preset)
    if all(d is None for d in dims):
        return DESIGN_STAIR
    if any(d is None for d in dims):
        raise ConfigError("--stair-length and --stair-height must be given together")
    return Stair(*dims)


def _rollout_cfg(args) -> RolloutConfig:
    return RolloutConfig(step_ds=args.step_ds, contact_tol=args.contact_tol)


def _profile(run, args):
    if args.wheel == "pro3":
        x = run.pro3.rod_max if args.extension is None else args.extension
        if not run.pro3.rod_min <= x <= run.pro3.rod_max:
            raise ConfigError(f"extension {x} mm outside stroke [{run.pro3.rod_min}, {run.pro3.rod_max}]")
        return wheel_profile(run.pro3, x, args.samples)
    rod = run.pro.rod_max if args.extension is None else args.extension
    solve_pro_hinge(run.pro, rod)
    return pro_wheel_profile(run.pro, rod, args.samples)


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------


def cmd_solve_pushrod(run):
    stair = _stair(run.args)
    target = required_span(stair, run.pro3)
    x = solve_pushrod(run.pro3, stair)
    t = pro3_span(run.pro3, x)
    run.write_json(
        "solve_pushrod.json",
        {"x_mm": x, "T_aim_mm": target, "T_of_x_mm": t, "residual_mm": t - target},
    )
    return EXIT_OK


def cmd_pro_angle(run):
    args = run.args
    if args.angle is not None:
        rod = pro_rod_for_angle(run.pro, args.angle)
    else:
        rod = args.rod_length
    x_a, y_a = solve_pro_hinge(run.pro, rod)
    run.write_json(
        "pro_angle.json",
        {"rod_mm": rod, "angle_deg": pro_opening_angle(run.pro, rod), "hinge_x_mm": x_a, "hinge_y_mm": y_a},
    )
    return EXIT_OK


def cmd_pro3_span(run):
    state = asdict(pro3_chain(run.pro3, run.args.x))
    payload = {}
    for key, value in state.items():
        unit = "deg" if key.startswith("alpha") else "mm"
        payload[f"{key}_{unit}"] = value
    run.write_json("pro3_span.json", payload)
    return EXIT_OK


def cmd_classify_stair(run):
    stair = _stair(run.args)
    run.write_json(
        "classify_stair.json",
        {
            "length_mm": stair.length,
            "height_mm": stair.height,
            "slope_deg": slope(stair),
            "class": classify(stair).value,
        },
    )
    return EXIT_OK


def cmd_roll(run):
    args = run.args
    sc = Staircase(_stair(args), n_steps=args.n_steps)
    poses = roll_wheel(_profile(run, args), sc, _rollout_cfg(args))
    body = body_from_path(poses, args.wheelbase)
    rows = [(b.s, *b.body_center, b.pitch, b.phase_difference) for b in body]
    run.write_csv("roll.csv", ("s", "x", "y", "pitch_deg", "phase_deg"), rows)
    if args.plot:
        prof = staircase_profile(sc)
        hub = np.array([p.wheel_center for p in poses])
        mid = np.array([b.body_center for b in body]) if body else np.empty((0, 2))
        run.write_svg(
            "roll.svg",
            [("stairs", prof[:, 0], prof[:, 1]), ("hub", hub[:, 0], hub[:, 1]), ("body", mid[:, 0], mid[:, 1])],
            title="Wheel-center trajectory",
            xlabel="x (mm)",
            ylabel="y (mm)",
            equal=True,
        )
    return EXIT_OK


def cmd_optimize_wheelbase(run):
    args = run.args
    stair = _stair(args)
    sc = Staircase(stair, n_steps=args.n_steps)
    template = SWHEGPRO3 if args.wheel == "pro3" else SWHEGPRO
    res = optimize_wheelbase(template, _profile(run, args), sc, tuple(args.range), args.grid, _rollout_cfg(args))
    notes = []
    payload = {"wheelbase_mm": res.wheelbase_mm, "rmse_mm": res.rmse_mm, "grid_best_mm": res.grid_best_mm}
    if stair == DESIGN_STAIR:
        lo, hi = REFERENCE_BAND_MM
        inside = lo <= res.wheelbase_mm <= hi
        payload["reference_band_mm"] = [lo, hi]
        payload["within_reference_band"] = inside
        if not inside:
            msg = (
                f"optimum {res.wheelbase_mm:.1f} mm lies outside the reference band "
                f"[{lo:g}, {hi:g}] mm around {REFERENCE_WHEELBASE_MM:g} mm"
            )
            notes.append(msg)
            print(f"warning: {msg}", file=sys.stderr)
    run.write_csv("sweep.csv", ("wheelbase_mm", "rmse_mm"), res.sweep, notes)
    run.write_json("optimum.json", payload)
    if args.plot:
        wb, rmse = np.array(res.sweep).T
        run.write_svg(
            "rmse.svg",
            [("RMSE", wb, rmse), ("optimum", [res.wheelbase_mm] * 2, [np.nanmin(rmse), np.nanmax(rmse)])],
            title="Trajectory RMSE vs wheelbase",
            xlabel="wheelbase (mm)",
            ylabel="RMSE (mm)",
        )
    return EXIT_OK


def cmd_gait_trace(run):
    args = run.args
    g = GaitParams(args.theta_s, args.theta_f, args.t_s, args.period, args.mode)
    table = gait_phases(args.gait)
    if not (args.rate > 0 and args.periods > 0):
        raise ConfigError("rate and periods must be positive")
    n = int(round(args.periods * g.T_c * args.rate))
    rows = []
    for i in range(n):
        t = i / args.rate
        rows.extend((t, leg, leg_angle(g, table, leg, t)) for leg in LEGS)
    run.write_csv("gait_trace.csv", ("t", "leg", "angle_deg"), rows)
    if args.plot:
        t = np.arange(n) / args.rate
        series = [(leg, t, [r[2] for r in rows[k::6]]) for k, leg in enumerate(LEGS[:3])]
        run.write_svg("gait_trace.svg", series, title=f"{table.name} gait", xlabel="t (s)", ylabel="angle (deg)")
    return EXIT_OK


def cmd_metrics(run):
    args = run.args
    path = Path(args.telemetry)
    if not path.is_file():
        raise ConfigError(f"telemetry file not found: {path}")
    run.inputs["telemetry"] = _digest(path)
    log = parse_telemetry(path)
    window = tuple(args.window) if args.window is not None else None
    report = stability_report(log, _stair(args), args.period, window, args.mass)
    run.write_json("metrics.json", report.to_dict())
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--spec", help="JSON module spec file (sections 'pro' and 'pro3')")
    common.add_argument("--out", default=".", help="output directory (default: current)")
    common.add_argument("--plot", action="store_true", help="also write an SVG plot")
    common.add_argument("--preset", choices=sorted(PRESETS), type=str.upper, help="stair preset")
    common.add_argument("--stair-length", type=float, help="tread depth L, mm")
    common.add_argument("--stair-height", type=float, help="riser height H, mm")

    rolling = argparse.ArgumentParser(add_help=False)
    rolling.add_argument("--wheel", choices=("pro3", "pro"), default="pro3")
    rolling.add_argument("--extension", type=float, help="push-rod setting, mm (default: fully open)")
    rolling.add_argument("--samples", type=int, default=64, help="outline vertices per spoke")
    rolling.add_argument("--n-steps", type=int, default=10)
    rolling.add_argument("--step-ds", type=float, default=2.0, help="progress per sample, mm")
    rolling.add_argument("--contact-tol", type=float, default=0.5, help="mm")

    p = argparse.ArgumentParser(prog="wheelleg", description=__doc__.split("\n\n")[0])
    p.add_argument("--version", action="version", version=f"wheelleg {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("solve-pushrod", parents=[common], help="push-rod extension for a stair")
    s.set_defaults(func=cmd_solve_pushrod)

    s = sub.add_parser("pro-angle", parents=[common], help="two-spoke opening angle")
    g = s.add_mutually_exclusive_group(required=True)
    g.add_argument("--rod-length", type=float, help="mm")
    g.add_argument("--angle", type=float, help="target opening angle, deg (inverse)")
    s.set_defaults(func=cmd_pro_angle)

    s = sub.add_parser("pro3-span", parents=[common], help="three-spoke chain at an extension")
    s.add_argument("--x", type=float, required=True, help="push-rod extension, mm")
    s.set_defaults(func=cmd_pro3_span)

    s = sub.add_parser("classify-stair", parents=[common], help="stair slope and type")
    s.set_defaults(func=cmd_classify_stair)

    s = sub.add_parser("roll", parents=[common, rolling], help="roll a wheel up a staircase")
    s.add_argument("--wheelbase", type=float, default=SWHEGPRO3.wheelbase * 1000.0, help="mm")
    s.set_defaults(func=cmd_roll)

    s = sub.add_parser("optimize-wheelbase", parents=[common, rolling], help="RMSE wheelbase sweep")
    s.add_argument("--range", type=float, nargs=2, default=(400.0, 650.0), metavar=("LO", "HI"), help="mm")
    s.add_argument("--grid", type=int, default=26)
    s.set_defaults(func=cmd_optimize_wheelbase)

    s = sub.add_parser("gait-trace", parents=[common], help="per-leg joint angle trace")
    s.add_argument("--gait", default="tripod")
    s.add_argument("--mode", default="RHex", choices=("RHex", "SWheg", "Wheeled"))
    s.add_argument("--theta-s", type=float, default=150.0, help="touch-down angle, deg")
    s.add_argument("--theta-f", type=float, default=210.0, help="lift-off angle, deg")
    s.add_argument("--t-s", type=float, default=0.5, help="stance time, s")
    s.add_argument("--period", type=float, default=1.0, help="cycle period T_c, s")
    s.add_argument("--periods", type=float, default=2.0)
    s.add_argument("--rate", type=float, default=100.0, help="samples per second")
    s.set_defaults(func=cmd_gait_trace)

    s = sub.add_parser("metrics", parents=[common], help="stability report for a telemetry CSV")
    s.add_argument("telemetry")
    s.add_argument("--period", type=float, required=True, help="gait cycle period, s")
    s.add_argument("--window", type=float, nargs=2, metavar=("T0", "T1"), help="analysis window, s")
    s.add_argument("--mass", type=float, default=10.08, help="robot mass for SR, kg")
    s.set_defaults(func=cmd_metrics)
    return p


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    args = build_parser().parse_args(argv)
    try:
        return args.func(_Run(args, argv))
    except Unreachable as exc:
        print(f"error: unreachable: {exc}", file=sys.stderr)
        return EXIT_GEOMETRY
    except GeometryError as exc:
        print(f"error: geometry: {exc}", file=sys.stderr)
        return EXIT_GEOMETRY
    except RolloutError as exc:
        print(f"error: rollout: {exc}", file=sys.stderr)
        return EXIT_STUCK
    except ParseError as exc:
        print(f"error: telemetry: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (ConfigError, BadInput, TooShort, EmptyWindow) as exc:
        print(f"error: config: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
