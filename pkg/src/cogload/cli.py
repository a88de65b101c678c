"""Command line front end: serve, simulate, analyze, validate-config."""

from __future__ import annotations

import argparse
import dataclasses
import sys
from pathlib import Path

from .analysis import phase_report
from .config import ConfigError, parse_config, render_config
from .participant import ParticipantModel, play_session
from .telemetry import SchemaViolation, read_log

MODEL_PRESETS = {
    "default": ParticipantModel(),
    "flawless": ParticipantModel(miss_prob=0.0, error_prob_easy=0.0,
                                 error_prob_hard=0.0),
    "load_sensitive": ParticipantModel(rt_dual_penalty_ms=300.0),
}


def _parse_seed_range(text: str) -> list[int]:
    if ":" in text:
        lo, hi = text.split(":", 1)
        first, last = int(lo), int(hi)
        if last < first:
            raise argparse.ArgumentTypeError(f"empty seed range {text!r}")
        return list(range(first, last + 1))
    return [int(text)]


def _load_config(path: str):
    try:
        return parse_config(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise SystemExit(f"cannot read config: {exc}")
    except ConfigError as exc:
        raise SystemExit(f"invalid config: {exc}")


def _build_model(args: argparse.Namespace) -> ParticipantModel:
    model = MODEL_PRESETS[args.model]
    overrides = {}
    for name in ("rt_lognormal_mu", "rt_lognormal_sigma", "rt_dual_penalty_ms",
                 "answer_latency_ms_per_digit", "error_prob_easy",
                 "error_prob_hard", "miss_prob"):
        value = getattr(args, name)
        if value is not None:
            overrides[name] = value
    return dataclasses.replace(model, **overrides) if overrides else model


def cmd_serve(args: argparse.Namespace) -> int:
    import socket

    import uvicorn

    from .service import create_app

    host, _, port_text = args.listen.rpartition(":")
    host = host or "127.0.0.1"
    try:
        port = int(port_text)
    except ValueError:
        print(f"bind failure: bad listen address {args.listen!r}", file=sys.stderr)
        return 2
    # uvicorn reports bind errors via sys.exit; probe the address first so
    # a taken port fails fast with a distinct status
    probe = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
    try:
        probe.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
        probe.bind((host, port))
    except OSError as exc:
        print(f"bind failure: {exc}", file=sys.stderr)
        return 2
    finally:
        probe.close()
    app = create_app(Path(args.config_dir) if args.config_dir else None)
    try:
        uvicorn.run(app, host=host, port=port, log_level="info")
    except OSError as exc:
        print(f"bind failure: {exc}", file=sys.stderr)
        return 2
    return 0


def cmd_simulate(args: argparse.Namespace) -> int:
    config = _load_config(args.config)
    model = _build_model(args)
    seeds = args.seeds if args.seeds is not None else [config.rng_seed]
    out = Path(args.out)
    for seed in seeds:
        session_config = dataclasses.replace(config, rng_seed=seed)
        target = out if len(seeds) == 1 else (
            out / f"{config.user_id}_{config.scene.value}_seed{seed}")
        played = play_session(session_config, model, out_dir=target)
        summary = played.recorder.build_summary()
        print(f"seed {seed}: {len(played.recorder.records)} records, "
              f"hits={summary.hit_count} misses={summary.miss_count} -> {target}")
    return 0


def cmd_analyze(args: argparse.Namespace) -> int:
    paths = [Path(text) for text in args.csv]
    # generic names like out/<run>/events.csv collide on the stem; qualify
    # every member of a colliding group with its parent directory
    stems = [p.stem for p in paths]
    contested = {stem for stem in stems if stems.count(stem) > 1}
    logs = {}
    for path in paths:
        label = path.stem
        if label in contested and path.parent.name:
            label = f"{path.parent.name}/{label}"
        if label in logs:
            raise SystemExit(f"duplicate session log {path}")
        try:
            logs[label] = read_log(path.read_text(encoding="utf-8"))
        except OSError as exc:
            raise SystemExit(f"cannot read {path}: {exc}")
        except SchemaViolation as exc:
            raise SystemExit(f"bad log {path}: {exc}")
    report = phase_report(logs, window_s=args.window_s)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / "report.csv").write_text(report.to_csv(), encoding="utf-8")
    (out / "report.txt").write_text(report.to_text(), encoding="utf-8")
    print(report.to_text(), end="")
    return 0


def cmd_validate_config(args: argparse.Namespace) -> int:
    try:
        config = parse_config(Path(args.config).read_text(encoding="utf-8"))
    except OSError as exc:
        print(f"cannot read config: {exc}", file=sys.stderr)
        return 2
    except ConfigError as exc:
        print(f"invalid: {exc}", file=sys.stderr)
        return 2
    print("ok")
    print(render_config(config), end="")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cogload")
    sub = parser.add_subparsers(dest="command", required=True)

    p_serve = sub.add_parser("serve", help="run the session service")
    p_serve.add_argument("--listen", default="127.0.0.1:8000")
    p_serve.add_argument("--config-dir", default=None,
                         help="directory for finished-session artifacts")
    p_serve.set_defaults(func=cmd_serve)

    p_sim = sub.add_parser("simulate", help="play scripted sessions headlessly")
    p_sim.add_argument("config")
    p_sim.add_argument("--out", default="out")
    p_sim.add_argument("--seeds", type=_parse_seed_range, default=None,
                       help="seed or inclusive range a:b; default: config seed")
    p_sim.add_argument("--model", choices=sorted(MODEL_PRESETS), default="default")
    for name in ("rt_lognormal_mu", "rt_lognormal_sigma", "rt_dual_penalty_ms",
                 "answer_latency_ms_per_digit", "error_prob_easy",
                 "error_prob_hard", "miss_prob"):
        p_sim.add_argument(f"--{name.replace('_', '-')}", dest=name,
                           type=float, default=None)
    p_sim.set_defaults(func=cmd_simulate)

    p_an = sub.add_parser("analyze", help="phase-level correlation report")
    p_an.add_argument("csv", nargs="+")
    p_an.add_argument("--window-s", type=float, default=5.0)
    p_an.add_argument("--out", default=".")
    p_an.set_defaults(func=cmd_analyze)

    p_val = sub.add_parser("validate-config", help="check a config file")
    p_val.add_argument("config")
    p_val.set_defaults(func=cmd_validate_config)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
