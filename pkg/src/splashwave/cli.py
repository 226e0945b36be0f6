"""Command-line entry point.

Subcommands:

    simulate           run a scenario from a config file, writing the time
                       series, snapshots, checkpoints and a run manifest
    diagnose           recompute every observable from stored snapshots
    fit                power-law fit of a time-series column, with a
                       gnuplot-compatible overlay file
    make-initial-data  construct and validate a preset initial state
    report             render figures for a finished run directory

Exit codes: 0 normal, 2 configuration error, 3 validation failure,
4 numerical abort.
"""

from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path

import numpy as np

from . import diagnostics, io, presets, report
from .errors import (CompatibilityError, ConfigError, ConstructionError,
                     SplashwaveError)
from .evolution import run as run_evolution

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_VALIDATION = 3
EXIT_NUMERICAL = 4


def _fmt(x: float) -> str:
    return io.FLOAT_FMT.format(float(x))


def cmd_simulate(args) -> int:
    try:
        cfg = io.read_config(args.config)
    except (ConfigError, OSError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    out = Path(args.output_dir or cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)

    try:
        if cfg.preset == "custom_file":
            snap = cfg.preset_params.get("file") or args.initial
            if snap is None:
                raise ConfigError("custom_file preset needs --initial SNAPSHOT")
            state = io.read_snapshot(snap)
            init_report = presets.InitialDataReport("custom_file")
            state = presets._as_formulation(state, cfg.formulation)
        else:
            state, init_report = presets.build(cfg.preset, cfg.n_points,
                                               cfg.formulation, cfg.domain,
                                               cfg.preset_params)
    except (ConstructionError, CompatibilityError, ConfigError) as exc:
        print(f"initial data validation failed: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except SplashwaveError as exc:
        print(f"initial data construction aborted: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL

    (out / "initial_report.txt").write_text(str(init_report) + "\n")
    io.write_config(cfg, out / "config.txt")

    stepper = cfg.stepper()
    writer = io.TimeSeriesWriter(out / "timeseries.csv")
    snap_counter = {"i": 0}
    ckpt_counter = {"i": 0}

    def snapshot_sink(st):
        idx = snap_counter["i"]
        io.write_snapshot(st, out / f"snapshot_{idx:06d}.csv")
        snap_counter["i"] += 1
        ckpt_counter["i"] += 1
        if cfg.checkpoint_every and ckpt_counter["i"] % max(
                cfg.checkpoint_every // max(cfg.snapshot_every, 1), 1) == 0:
            io.write_checkpoint(out / "checkpoint.json", st, cfg, idx,
                                stepper.dt, [])

    warnings: list[str] = []
    t0 = time.monotonic()
    try:
        result = run_evolution(state, stepper, record_sink=writer.append,
                               snapshot_sink=snapshot_sink,
                               warn_sink=warnings.append)
    except SplashwaveError as exc:
        writer.close()
        print(f"numerical abort: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    wall = time.monotonic() - t0
    writer.close()
    io.write_snapshot(result.final_state, out / "final_state.csv")
    io.write_checkpoint(out / "checkpoint.json", result.final_state, cfg,
                        result.steps_accepted, result.dt_final, result.records)
    if warnings:
        (out / "warnings.txt").write_text("\n".join(warnings) + "\n")
    io.write_manifest(out / "manifest.json", cfg, result, wall, {
        "timeseries": "timeseries.csv",
        "final_state": "final_state.csv",
        "checkpoint": "checkpoint.json",
    })
    print(f"terminated: {result.reason} at t={_fmt(result.final_state.time)} "
          f"({result.steps_accepted} steps, {result.steps_rejected} rejections, "
          f"{wall:.1f}s)")
    if result.reason == "aborted":
        print(f"detail: {result.detail}", file=sys.stderr)
        return EXIT_NUMERICAL
    return EXIT_OK


def cmd_diagnose(args) -> int:
    rows = []
    try:
        for path in args.snapshots:
            state = io.read_snapshot(path)
            cfg_kw = {}
            if args.gravity is not None:
                cfg_kw["gravity"] = args.gravity
            from .evolution import StepperConfig
            record = diagnostics.compute_record(state, StepperConfig(**cfg_kw))
            rows.append(record)
    except ConfigError as exc:
        print(f"snapshot validation failed: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except SplashwaveError as exc:
        print(f"diagnostics failed: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    out = Path(args.output or "diagnostics.csv")
    writer = io.TimeSeriesWriter(out)
    for r in rows:
        writer.append(r)
    writer.close()
    print(f"wrote {out} ({len(rows)} records)")
    return EXIT_OK


def cmd_fit(args) -> int:
    try:
        series = io.read_time_series(args.timeseries)
    except (OSError, ValueError) as exc:
        print(f"cannot read time series: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    if args.column not in series:
        print(f"no column {args.column!r}; available: {', '.join(series)}",
              file=sys.stderr)
        return EXIT_CONFIG
    t = series["t"]
    y = series[args.column]
    if args.invert:
        with np.errstate(divide="ignore"):
            y = 1.0 / y
    keep = np.isfinite(y) & (t > 0)
    t, y = t[keep], y[keep]
    if args.head_fraction is not None:
        m = max(int(len(t) * args.head_fraction), 4)
        t, y = t[:m], y[:m]
    try:
        fit = diagnostics.fit_power_law(t, y, fix_exponent=args.fix_exponent)
    except ValueError as exc:
        print(f"fit input error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except SplashwaveError as exc:
        print(f"fit failed: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    print(f"fit: a={_fmt(fit.amplitude)} b={_fmt(fit.exponent)} "
          f"c={_fmt(fit.offset)} rms={_fmt(fit.residual_rms)}")
    overlay = Path(args.overlay or "fit_overlay.dat")
    dense = np.linspace(t.min(), t.max(), 400)
    lines = [f"# power-law fit of {args.column}: a*t^b + c with "
             f"a={_fmt(fit.amplitude)} b={_fmt(fit.exponent)} c={_fmt(fit.offset)}"]
    lines += [f"{_fmt(ti)} {_fmt(vi)}" for ti, vi in zip(dense, fit(dense))]
    overlay.write_text("\n".join(lines) + "\n")
    if args.figure:
        report.render_fit(t, y, fit, Path(args.figure), label=args.column)
    return EXIT_OK


def cmd_make_initial_data(args) -> int:
    params = {}
    for item in args.param or []:
        if "=" not in item:
            print(f"bad -p {item!r}: expected name=value", file=sys.stderr)
            return EXIT_CONFIG
        key, val = item.split("=", 1)
        params[key.strip()] = float(val)
    try:
        state, rep = presets.build(args.preset, args.n, args.formulation,
                                   args.domain, params)
    except (ConstructionError, CompatibilityError) as exc:
        print(f"validation failed: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except SplashwaveError as exc:
        print(f"construction aborted: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    io.write_snapshot(state, args.output)
    report_path = Path(args.output).with_suffix(".report.txt")
    report_path.write_text(str(rep) + "\n")
    print(f"wrote {args.output} and {report_path}")
    if rep.validation is not None and not rep.validation.ok:
        failed = ", ".join(rep.validation.failed())
        print(f"validation failures: {failed}", file=sys.stderr)
        return EXIT_VALIDATION
    return EXIT_OK


def cmd_report(args) -> int:
    made = report.render_run(args.run_dir)
    if not made:
        print(f"no renderable artifacts under {args.run_dir}", file=sys.stderr)
        return EXIT_CONFIG
    for p in made:
        print(f"wrote {p}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="splashwave", description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="run a scenario from a config file")
    p.add_argument("config", help="flat key-value configuration file")
    p.add_argument("--output-dir", help="override the config's output_dir")
    p.add_argument("--initial", help="snapshot file for the custom_file preset")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("diagnose", help="recompute observables from snapshots")
    p.add_argument("snapshots", nargs="+")
    p.add_argument("--output", "-o")
    p.add_argument("--gravity", type=float, default=None)
    p.set_defaults(func=cmd_diagnose)

    p = sub.add_parser("fit", help="power-law fit of a time-series column")
    p.add_argument("timeseries")
    p.add_argument("column")
    p.add_argument("--fix-exponent", type=float, default=None)
    p.add_argument("--invert", action="store_true",
                   help="fit the reciprocal of the column")
    p.add_argument("--head-fraction", type=float, default=None,
                   help="fit only the leading fraction of the records")
    p.add_argument("--overlay", help="two-column overlay output (gnuplot-ready)")
    p.add_argument("--figure", help="also render a PNG of data and fit")
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("make-initial-data", help="construct a preset initial state")
    p.add_argument("preset", choices=[s for s in presets.PRESETS if s != "custom_file"])
    p.add_argument("output")
    p.add_argument("--n", type=int, default=256)
    p.add_argument("--formulation", choices=("phi", "omega"), default="omega")
    p.add_argument("--domain", choices=("physical", "tilde"), default="physical")
    p.add_argument("-p", "--param", action="append",
                   help="preset parameter name=value (repeatable)")
    p.set_defaults(func=cmd_make_initial_data)

    p = sub.add_parser("report", help="render figures for a run directory")
    p.add_argument("run_dir")
    p.set_defaults(func=cmd_report)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
