"""Command-line interface: batch runs, log replay, metrics aggregation, serve."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .dynamics import ControlConfig
from .pilots import KINDS, PilotSpec
from .prf import PrfConfig
from .runner import CONDITIONS, MODES, RunSpec, run_batch, write_batch
from .safety_filter import FilterConfig
from .trial import compute_metrics, log_from_jsonl
from .world import CrashConfig


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cbfteleop")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run scripted trials")
    run.add_argument("--world", default="default", help="world file path or built-in name")
    run.add_argument("--condition", default="CBF", choices=CONDITIONS)
    run.add_argument("--mode", default="haptic_only", choices=MODES)
    run.add_argument("--pilot", default="waypoint", choices=KINDS)
    run.add_argument("--trials", type=int, default=1)
    run.add_argument("--seed", type=int, default=0)
    run.add_argument("--out", default=None, help="directory for jsonl logs + summary")
    run.add_argument("--timeout", type=float, default=300.0, help="simulated seconds")
    run.add_argument("--p-gain", type=float, default=2.0, help="barrier constraint gain (1/s)")
    run.add_argument("--noise-std", type=float, default=0.0, help="pilot stick drift std (cm)")
    run.add_argument("--admittance", type=float, default=0.0, help="pilot hand yield (cm/N)")

    replay = sub.add_parser("replay", help="recompute metrics from a trial log")
    replay.add_argument("--log", required=True)
    replay.add_argument("--csv", default=None, help="also export samples as CSV here")

    metrics = sub.add_parser("metrics", help="aggregate a directory of logs to CSV")
    metrics.add_argument("--log-dir", required=True)
    metrics.add_argument("--out", default=None, help="CSV path (default: stdout)")

    serve = sub.add_parser("serve", help="start the live teleoperation server")
    serve.add_argument("--config", default=None, help="JSON config file")
    serve.add_argument("--host", default=None)
    serve.add_argument("--port", type=int, default=None)
    serve.add_argument("--world", default=None)
    serve.add_argument("--condition", default=None, choices=CONDITIONS)
    serve.add_argument("--ui", default=None, help="directory with the operator console build")
    return parser


def _cmd_run(args) -> int:
    try:
        spec = RunSpec(
            world=args.world,
            condition=args.condition,
            mode=args.mode,
            pilot=PilotSpec(kind=args.pilot, noise_std=args.noise_std, admittance=args.admittance, seed=args.seed),
            trials=args.trials,
            seed=args.seed,
            timeout=args.timeout,
            control=ControlConfig(frame="world"),
            filter=FilterConfig(gain=args.p_gain),
            prf=PrfConfig(),
            crash=CrashConfig(),
        )
        logs, summary = run_batch(spec)
    except (ValueError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    if args.out:
        write_batch(logs, summary, args.out)
    print(json.dumps(summary, indent=2, sort_keys=True))
    return 0


def _cmd_replay(args) -> int:
    try:
        log = log_from_jsonl(Path(args.log).read_text())
    except (OSError, ValueError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    recomputed = compute_metrics(log) if len(log.samples) >= 2 else {}
    print(
        json.dumps(
            {
                "condition": log.condition,
                "outcome": log.outcome,
                "fail_reason": log.fail_reason,
                "samples": len(log.samples),
                "metrics": recomputed,
            },
            indent=2,
            sort_keys=True,
        )
    )
    if args.csv:
        Path(args.csv).write_text(log.to_csv())
    return 0


def _cmd_metrics(args) -> int:
    rows = ["file,condition,seed,outcome,fail_reason,D_total,T_trial,V_avg,T_collision"]
    log_dir = Path(args.log_dir)
    files = sorted(log_dir.glob("*.jsonl"))
    if not files:
        print(f"error: no .jsonl logs in {log_dir}", file=sys.stderr)
        return 2
    for path in files:
        try:
            log = log_from_jsonl(path.read_text())
        except (ValueError, json.JSONDecodeError) as exc:
            print(f"error: {path}: {exc}", file=sys.stderr)
            return 2
        m = log.metrics or {}
        rows.append(
            ",".join(
                [
                    path.name,
                    log.condition,
                    str(log.seed),
                    log.outcome,
                    log.fail_reason,
                    *(repr(m.get(k, "")) for k in ("D_total", "T_trial", "V_avg", "T_collision")),
                ]
            )
        )
    text = "\n".join(rows) + "\n"
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return 0


def _cmd_serve(args) -> int:
    import uvicorn

    from .server import ServerConfig, create_app, load_server_config

    try:
        cfg = load_server_config(args.config) if args.config else ServerConfig()
        if args.host:
            cfg.host = args.host
        if args.port:
            cfg.port = args.port
        if args.world:
            cfg.world = args.world
        if args.condition:
            cfg.condition = args.condition
        app = create_app(cfg, ui_dir=args.ui)
    except (ValueError, FileNotFoundError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    uvicorn.run(app, host=cfg.host, port=cfg.port, log_level="info")
    return 0


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    if args.command == "run":
        return _cmd_run(args)
    if args.command == "replay":
        return _cmd_replay(args)
    if args.command == "metrics":
        return _cmd_metrics(args)
    if args.command == "serve":
        return _cmd_serve(args)
    return 2  # pragma: no cover


if __name__ == "__main__":
    sys.exit(main())
