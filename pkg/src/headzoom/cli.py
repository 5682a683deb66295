"""Thin command-line client for the pipeline.

Subcommands: calibrate, synth, replay, metrics, stats, serve. Batch
commands call the core library directly so runs are offline and
byte-deterministic; `serve` starts the FastAPI service. The env var
HEADZOOM_CONFIG may point to a JSON file mirroring EngineConfig; command
line flags override it field by field.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from .calibration import (
    CalibrationError,
    calibrate,
    load_profile,
    save_profile,
)
from .geometry import DegeneratePoseError
from .metrics import compute_report, write_metrics_table
from .modes import EngineConfig, EngineError, ZoomRange, replay
from .stats import MetricTable, StatsError, analyze, report_text, report_tsv, write_report
from .trace_io import (
    BadScriptError,
    MotionScript,
    TraceParseError,
    TrialValidationError,
    parse_script,
    read_trace,
    read_trial,
    read_view_stream,
    synthesize_trace,
    write_trace,
    write_view_stream,
)

CONFIG_ENV = "HEADZOOM_CONFIG"

EXIT_OK = 0
EXIT_ERROR = 2
EXIT_EMPTY_REPORT = 3

_DOMAIN_ERRORS = (
    CalibrationError,
    DegeneratePoseError,
    EngineError,
    TraceParseError,
    TrialValidationError,
    BadScriptError,
    StatsError,
    OSError,
    ValueError,
)


def _env_config() -> dict:
    path = os.environ.get(CONFIG_ENV)
    if not path:
        return {}
    return json.loads(Path(path).read_text())


def _engine_config(args) -> EngineConfig:
    base = EngineConfig.from_dict(_env_config()) if _env_config() else EngineConfig(mode="static")
    mode = args.mode if args.mode is not None else base.mode
    zmin = args.zoom_min if args.zoom_min is not None else base.zoom_range.min_zoom
    zmax = args.zoom_max if args.zoom_max is not None else base.zoom_range.max_zoom
    return EngineConfig(
        mode=mode,
        zoom_range=ZoomRange(zmin, zmax),
        max_head_speed_m_s=base.max_head_speed_m_s,
        gap_timeout_s=base.gap_timeout_s,
        schedule_override=base.schedule_override,
    )


def cmd_calibrate(args) -> int:
    neutral = read_trace(args.neutral)
    forward = read_trace(args.forward)
    backward = read_trace(args.backward)
    profile = calibrate(neutral.samples, forward.samples, backward.samples)
    save_profile(profile, args.out)
    print(
        f"calibrated: forward {profile.forward_limit_m:.4f} m, "
        f"backward {profile.backward_limit_m:.4f} m -> {args.out}"
    )
    return EXIT_OK


def cmd_synth(args) -> int:
    script = parse_script(Path(args.script).read_text())
    if args.seed is not None:
        script = MotionScript(
            script.segments,
            rate_hz=script.rate_hz,
            seed=args.seed,
            noise_pos_m=script.noise_pos_m,
            noise_ang_rad=script.noise_ang_rad,
        )
    profile = load_profile(args.profile) if args.profile else None
    trace = synthesize_trace(script, profile)
    write_trace(trace, args.out)
    print(f"synthesized {len(trace.samples)} samples -> {args.out}")
    return EXIT_OK


def cmd_replay(args) -> int:
    config = _engine_config(args)
    profile = load_profile(args.profile) if args.profile else None
    trace = read_trace(args.trace)
    views = replay(trace.samples, config, profile)
    write_view_stream(views, args.out)
    print(f"replayed {len(views)} ticks ({config.mode}) -> {args.out}")
    return EXIT_OK


def cmd_metrics(args) -> int:
    trial = read_trial(args.trial)
    trace_path = Path(trial.trace_path)
    if not trace_path.is_absolute() and not trace_path.exists():
        trace_path = Path(args.trial).parent / trace_path
    trace = read_trace(trace_path)
    views = read_view_stream(args.views)
    profile = load_profile(args.profile)
    report = compute_report(
        trial,
        trace.samples,
        views,
        profile,
        zoom_epsilon=args.epsilon_zoom,
    )
    write_metrics_table([report], args.out)
    print(f"metrics for {trial.participant}/{trial.mode}/{trial.image_id} -> {args.out}")
    return EXIT_OK


def cmd_stats(args) -> int:
    table = MetricTable.from_wide_tsv(Path(args.table).read_text())
    report = analyze(table)
    write_report(report, args.out, args.text_out)
    if report.empty:
        print("no analyzable metrics", file=sys.stderr)
        return EXIT_EMPTY_REPORT
    print(report_text(report), end="")
    print(f"report -> {args.out}")
    return EXIT_OK


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    config = _engine_config(args)
    profile = load_profile(args.profile) if args.profile else None
    frontend = args.frontend
    if frontend is None and Path("frontend/index.html").exists():
        frontend = "frontend"
    app = create_app(config, profile, frontend_dir=frontend)
    if frontend:
        print(f"demo UI: http://{args.host}:{args.port}/app/")
    uvicorn.run(app, host=args.host, port=args.port, log_level="info")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="headzoom",
        description="head-pose zoom/pan engine: calibration, replay, metrics, stats, live serving",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("calibrate", help="build a calibration profile from three held captures")
    p.add_argument("--neutral", required=True, help="pose trace held at the neutral position")
    p.add_argument("--forward", required=True, help="pose trace held at the comfortable forward lean")
    p.add_argument("--backward", required=True, help="pose trace held at the comfortable backward lean")
    p.add_argument("--out", required=True, help="profile file to write")
    p.set_defaults(func=cmd_calibrate)

    p = sub.add_parser("synth", help="synthesize a pose trace from a motion script")
    p.add_argument("--script", required=True, help="motion script file")
    p.add_argument("--seed", type=int, default=None, help="override the script's noise seed")
    p.add_argument("--profile", default=None, help="calibration profile for lean geometry")
    p.add_argument("--out", required=True, help="trace file to write")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("replay", help="run a trace through the engine, write the view stream")
    p.add_argument("--trace", required=True)
    p.add_argument("--mode", choices=("static", "parallel", "tilt"), default=None)
    p.add_argument("--profile", default=None)
    p.add_argument("--zoom-min", type=float, default=None)
    p.add_argument("--zoom-max", type=float, default=None)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_replay)

    p = sub.add_parser("metrics", help="compute the per-trial metric row")
    p.add_argument("--trial", required=True, help="trial record JSON")
    p.add_argument("--views", required=True, help="view stream from replay/serve")
    p.add_argument("--profile", required=True)
    p.add_argument("--epsilon-zoom", type=float, default=None, help="meaningful zoom-change amplitude")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_metrics)

    p = sub.add_parser("stats", help="mode-comparison analysis over a metrics table")
    p.add_argument("--table", required=True)
    p.add_argument("--out", required=True, help="report TSV to write")
    p.add_argument("--text-out", default=None, help="optional human-readable report")
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("serve", help="run the live demo service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--mode", choices=("static", "parallel", "tilt"), default=None)
    p.add_argument("--profile", default=None)
    p.add_argument("--zoom-min", type=float, default=None)
    p.add_argument("--zoom-max", type=float, default=None)
    p.add_argument("--frontend", default=None, help="directory with the browser demo to host at /app")
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except _DOMAIN_ERRORS as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
