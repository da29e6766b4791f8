"""Command-line entry point: ``pedsynth <subcommand> ...``.

Every subcommand that writes a file also writes ``<file>.manifest``, a
key=value record of the tool version, resolved configuration, seed, and
SHA-256 digests of inputs and outputs.
"""

from __future__ import annotations

import argparse
import hashlib
import logging
import secrets
import sys
from dataclasses import asdict
from pathlib import Path

from pedsynth import __version__
from pedsynth.baseline import PredictorConfig, predict
from pedsynth.io import read_dataset, read_predictions, write_predictions, format_dataset
from pedsynth.metrics import evaluate
from pedsynth.sampler import SamplerConfig, format_provenance, generate_scenes, scenes_to_dataset
from pedsynth.statistics import compute_statistics

STATS_FORMAT = "pedsynth-stats/1"


def _digest(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def write_manifest(output, command: str, config: dict, inputs=(), outputs=()) -> Path:
    lines = [f"tool=pedsynth", f"version={__version__}", f"command={command}"]
    lines += [f"config.{k}={v}" for k, v in config.items()]
    lines += [f"input.{Path(p).name}.sha256={_digest(p)}" for p in inputs]
    lines += [f"output.{Path(p).name}.sha256={_digest(p)}" for p in outputs]
    path = Path(str(output) + ".manifest")
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def _resolve_seed(seed):
    if seed is None:
        seed = secrets.randbits(63)
        print(f"seed={seed}", file=sys.stderr)
    return seed


def _write(path, text: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def cmd_stats(args) -> int:
    data = read_dataset(args.input, dt=args.dt)
    stats = compute_statistics(data, pooling=args.pooling)
    report = "".join(
        f"{k}={v}\n"
        for k, v in [
            ("format", STATS_FORMAT),
            ("K", stats.K),
            ("mu_p", repr(stats.mu_p)),
            ("sigma_p", repr(stats.sigma_p)),
            ("sigma_s", repr(stats.sigma_s)),
            ("frames", data.num_frames),
            ("frame_stride", data.frame_stride),
            ("dropped_tracks", data.dropped_tracks),
        ]
    )
    sys.stdout.write(report)
    config = {"dt": args.dt, "pooling": args.pooling}
    if args.out:
        _write(args.out, report)
        write_manifest(args.out, "stats", config, [args.input], [args.out])
    if args.speeds_csv:
        rows = "".join(f"{k},{stats.mean_speeds[k]!r}\n" for k in sorted(stats.mean_speeds))
        _write(args.speeds_csv, "ped_id,mean_speed\n" + rows)
        write_manifest(args.speeds_csv, "stats", config, [args.input], [args.speeds_csv])
    return 0


def cmd_sample(args) -> int:
    real = read_dataset(args.input, dt=args.dt)
    stats = compute_statistics(real, pooling=args.pooling)
    cfg = SamplerConfig(
        N=args.timesteps,
        M=args.reps,
        dt=args.dt,
        r=args.radius,
        p_r=args.p_reverse,
        trunc_max_fraction=args.trunc_max,
        seed=_resolve_seed(args.seed),
        zero_sigma_s=args.zero_sigma_s,
        zero_sigma_p=args.zero_sigma_p,
        exhaustion_policy={"clamp": "clamp", "drop": "drop_remaining"}[args.exhaustion],
        stepping=args.stepping,
    )
    target = real.num_frames if args.equal_frames else None
    scenes = generate_scenes(stats, real.trajectories(), cfg, target_frames=target, workers=args.workers)
    synth = scenes_to_dataset(scenes, cfg, frame_stride=args.frame_stride)
    _write(args.out, format_dataset(synth))
    outputs = [args.out]
    if args.provenance:
        _write(args.provenance, format_provenance(scenes))
        outputs.append(args.provenance)
    config = asdict(cfg) | {
        "pooling": args.pooling,
        "frame_stride": args.frame_stride,
        "equal_frames": args.equal_frames,
        "target_frames": target,
        "scenes": len(scenes),
    }
    write_manifest(args.out, "sample", config, [args.input], outputs)
    print(f"scenes={len(scenes)} frames={synth.num_frames} pedestrians={synth.num_pedestrians}")
    return 0


def cmd_predict(args) -> int:
    data = read_dataset(args.input, dt=args.dt)
    cfg = PredictorConfig(
        observe_len=args.observe,
        horizon=args.horizon,
        J=args.samples,
        gamma=args.gamma,
        seed=_resolve_seed(args.seed),
    )
    preds = predict(data, cfg)
    write_predictions(preds, args.out)
    write_manifest(args.out, "predict-baseline", asdict(cfg) | {"dt": args.dt}, [args.input], [args.out])
    print(f"pedestrians={preds.num_peds} skipped={preds.excluded}")
    return 0


def _scored(args):
    truth = read_dataset(args.gt, dt=args.dt)
    return evaluate(read_predictions(args.pred).with_ground_truth(truth))


def _write_curve(path, curve) -> None:
    _write(path, "rank,mean_distance\n" + "".join(f"{q},{v!r}\n" for q, v in enumerate(curve.tolist())))


def cmd_evaluate(args) -> int:
    report = _scored(args)
    print(f"ADE={report.ade:.6f}")
    print(f"MDE={report.mde:.6f}")
    print(f"FDE={report.fde:.6f}")
    print(f"pedestrians={report.num_peds} horizon={report.horizon} J={report.J} excluded={report.excluded}")
    if args.curve_out:
        _write_curve(args.curve_out, report.quantile_curve)
        write_manifest(args.curve_out, "evaluate", {"dt": args.dt}, [args.gt, args.pred], [args.curve_out])
    return 0


def cmd_quantile_curve(args) -> int:
    report = _scored(args)
    _write_curve(args.out, report.quantile_curve)
    write_manifest(args.out, "quantile-curve", {"dt": args.dt}, [args.gt, args.pred], [args.out])
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pedsynth", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"pedsynth {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_dt(p):
        p.add_argument("--dt", type=float, default=0.4, help="seconds per timestep (default 0.4)")

    p = sub.add_parser("stats", help="summary statistics of a real dataset")
    p.add_argument("input")
    add_dt(p)
    p.add_argument("--pooling", choices=["within", "global"], default="within")
    p.add_argument("--out", help="also write the report here")
    p.add_argument("--speeds-csv", help="write per-pedestrian mean speeds as CSV")
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("sample", help="generate a synthetic dataset")
    p.add_argument("--input", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--reps", type=int, default=500, help="number of scenes M")
    p.add_argument("--timesteps", type=int, default=20, help="N; tracks have N+1 positions")
    add_dt(p)
    p.add_argument("--radius", type=float, default=2.0)
    p.add_argument("--p-reverse", type=float, default=0.5)
    p.add_argument("--trunc-max", type=float, default=0.5)
    p.add_argument("--seed", type=int)
    p.add_argument("--zero-sigma-s", action="store_true")
    p.add_argument("--zero-sigma-p", action="store_true")
    p.add_argument("--equal-frames", action="store_true", help="match the real frame count instead of --reps")
    p.add_argument("--exhaustion", choices=["clamp", "drop"], default="clamp")
    p.add_argument("--stepping", choices=["chord", "arc"], default="chord")
    p.add_argument("--pooling", choices=["within", "global"], default="within")
    p.add_argument("--frame-stride", type=int, default=10)
    p.add_argument("--provenance", help="write per-pedestrian provenance CSV")
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("predict-baseline", help="constant-velocity probabilistic predictions")
    p.add_argument("--input", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--observe", type=int, default=8)
    p.add_argument("--horizon", type=int, default=8)
    p.add_argument("--samples", type=int, default=100)
    p.add_argument("--gamma", type=float, default=0.1)
    p.add_argument("--seed", type=int)
    add_dt(p)
    p.set_defaults(func=cmd_predict)

    for name, func, help_ in [
        ("evaluate", cmd_evaluate, "ADE, MDE and FDE of a prediction file"),
        ("quantile-curve", cmd_quantile_curve, "per-rank mean distance curve"),
    ]:
        p = sub.add_parser(name, help=help_)
        p.add_argument("--gt", required=True)
        p.add_argument("--pred", required=True)
        add_dt(p)
        if name == "evaluate":
            p.add_argument("--curve-out")
        else:
            p.add_argument("--out", required=True)
        p.set_defaults(func=func)
    return parser


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (ValueError, RuntimeError, OSError) as exc:
        print(f"pedsynth {args.command}: error: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s: %(message)s")
    sys.exit(run())


if __name__ == "__main__":
    main()
