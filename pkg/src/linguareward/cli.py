"""Command-line interface.

Subcommands: ``train``, ``rollout``, ``correlate``, ``compare``, plus the
debug helpers ``describe`` and ``embed``.  Exit codes: 0 success, 2
configuration error, 3 runtime error.  The environment variable
``LINGUAREWARD_REMOTE_URL`` overrides the remote embedding endpoint.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from .config import (
    REMOTE_URL_ENV_VAR,
    ConfigError,
    experiment_config_from_dict,
    load_experiment_config,
)
from .describer import TASK_DESCRIBERS
from .embedding import EmbedderSpec, make_embedder
from .runner import (
    build_env,
    build_semantic_spec,
    compare,
    load_policy_for_env,
    run_rollout,
    run_training,
    write_comparison,
)
from .semantic_reward import wrap_env
from .stats import correlate_channels
from .trajectory import read_trajectory, write_trajectory

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_RUNTIME = 3


def _cmd_train(args) -> int:
    config = load_experiment_config(args.config)
    run_training(config)
    print(f"training complete; outputs in {config.output_dir}")
    return EXIT_OK


def _cmd_rollout(args) -> int:
    ckpt = Path(args.checkpoint)
    if not ckpt.exists():
        raise ConfigError(f"checkpoint not found: {ckpt}")
    out_dir = Path(args.out)
    if args.n > 0:
        out_dir.mkdir(parents=True, exist_ok=True)
    sidecar_path = Path(str(ckpt)[: -len(".npz")] + ".json") if str(ckpt).endswith(".npz") else None
    if sidecar_path is None or not sidecar_path.exists():
        raise ConfigError(f"checkpoint sidecar not found next to {ckpt}")
    sidecar = json.loads(sidecar_path.read_text(encoding="utf-8"))
    config = experiment_config_from_dict(sidecar["config"], str(sidecar_path))

    env = wrap_env(build_env(config), build_semantic_spec(config))
    params, _ = load_policy_for_env(ckpt, env)
    for i in range(args.n):
        seed = args.seed + i
        traj = run_rollout(
            env,
            params,
            seed,
            deterministic=not args.stochastic,
            meta={"task": config.task, "checkpoint": str(ckpt), "backend": config.embedder.backend},
        )
        path = out_dir / f"rollout_{i:04d}.jsonl"
        write_trajectory(path, traj)
        print(f"wrote {path} ({len(traj)} steps)")
    return EXIT_OK


def _cmd_correlate(args) -> int:
    if not args.files:
        raise ConfigError("no trajectory files given")
    xs, ys = [], []
    for f in args.files:
        if not Path(f).exists():
            raise ConfigError(f"trajectory file not found: {f}")
        traj = read_trajectory(f)
        try:
            xs.append(traj.channel(args.x))
            ys.append(traj.channel(args.y))
        except KeyError as exc:
            raise ConfigError(f"{f}: {exc.args[0]}") from exc
    x = np.concatenate(xs)
    y = np.concatenate(ys)
    report = correlate_channels(x, y, args.x, args.y, variant=args.variant)

    json_path = Path(args.out + ".json")
    csv_path = Path(args.out + ".csv")
    with open(json_path, "w", encoding="utf-8") as fh:
        json.dump(report.to_dict(), fh, indent=2)
        fh.write("\n")
    with open(csv_path, "w", encoding="utf-8") as fh:
        fh.write(f"{args.x},{args.y}\n")
        for xi, yi in zip(x, y):
            fh.write(f"{float(xi)!r},{float(yi)!r}\n")
    print(json.dumps(report.to_dict()))
    print(f"wrote {json_path} and {csv_path}")
    return EXIT_OK


def _cmd_compare(args) -> int:
    config_semantic = load_experiment_config(args.config_semantic)
    config_raw = load_experiment_config(args.config_raw)
    row = compare(config_semantic, config_raw, train_if_missing=args.train_if_missing)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    write_comparison(row, str(out) + ".json", str(out) + ".csv")
    print(json.dumps(row.to_dict()))
    return EXIT_OK


def _cmd_describe(args) -> int:
    if args.task not in TASK_DESCRIBERS:
        raise ConfigError(f"unknown task {args.task!r}; expected one of {sorted(TASK_DESCRIBERS)}")
    describer = TASK_DESCRIBERS[args.task]
    required = describer.required_metrics
    if len(args.values) != len(required):
        raise ConfigError(
            f"task {args.task!r} needs {len(required)} values ({', '.join(required)}), "
            f"got {len(args.values)}"
        )
    metrics = dict(zip(required, args.values))
    print(describer.describe(metrics))
    return EXIT_OK


def _cmd_embed(args) -> int:
    url = args.url or os.environ.get(REMOTE_URL_ENV_VAR)
    try:
        spec = EmbedderSpec(
            backend=args.backend,
            dim=args.dim,
            remote_url=url,
            cache_capacity=0,
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    embedder = make_embedder(spec)
    vec = embedder.embed([args.text])[0]
    print(
        json.dumps(
            {
                "backend": args.backend,
                "dim": len(vec),
                "norm": float(np.linalg.norm(vec)),
                "embedding": [float(v) for v in vec],
            }
        )
    )
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="linguareward",
        description="Semantic-reward reinforcement learning toolkit",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_train = sub.add_parser("train", help="train a policy from an experiment config")
    p_train.add_argument("config", help="path to the experiment JSON config")
    p_train.set_defaults(func=_cmd_train)

    p_roll = sub.add_parser("rollout", help="deterministic rollouts from a checkpoint")
    p_roll.add_argument("checkpoint", help="path to a .npz checkpoint")
    p_roll.add_argument("--n", type=int, default=1, help="number of rollouts")
    p_roll.add_argument("--seed", type=int, default=0, help="base seed; rollout i uses seed+i")
    p_roll.add_argument("--out", required=True, help="output directory for JSONL trajectories")
    p_roll.add_argument("--stochastic", action="store_true", help="sample instead of policy mean")
    p_roll.set_defaults(func=_cmd_rollout)

    p_corr = sub.add_parser("correlate", help="rank-correlate two trajectory channels")
    p_corr.add_argument("files", nargs="*", help="trajectory JSONL files")
    p_corr.add_argument("--x", required=True, help="x channel name")
    p_corr.add_argument("--y", required=True, help="y channel name")
    p_corr.add_argument("--variant", choices=("a", "b"), default="b", help="Kendall tau variant")
    p_corr.add_argument("--out", default="correlation", help="output prefix (.json and .csv)")
    p_corr.set_defaults(func=_cmd_correlate)

    p_cmp = sub.add_parser("compare", help="semantic-vs-raw policy comparison row")
    p_cmp.add_argument("config_semantic", help="experiment config with reward_mode=semantic")
    p_cmp.add_argument("config_raw", help="experiment config with reward_mode=raw")
    p_cmp.add_argument("--train-if-missing", action="store_true")
    p_cmp.add_argument("--out", default="comparison", help="output prefix (.json and .csv)")
    p_cmp.set_defaults(func=_cmd_compare)

    p_desc = sub.add_parser("describe", help="print the sentence for a numeric state")
    p_desc.add_argument("task", help="pendulum, burgers, or fluid")
    p_desc.add_argument("--values", type=float, nargs="+", required=True)
    p_desc.set_defaults(func=_cmd_describe)

    p_emb = sub.add_parser("embed", help="print the embedding of a sentence")
    p_emb.add_argument("--backend", choices=("hash", "numeric_oracle", "remote"), required=True)
    p_emb.add_argument("--text", required=True)
    p_emb.add_argument("--dim", type=int, default=768)
    p_emb.add_argument("--url", default=None, help="remote endpoint (or set LINGUAREWARD_REMOTE_URL)")
    p_emb.set_defaults(func=_cmd_embed)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except Exception as exc:  # runtime failures map to a distinct exit code
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
