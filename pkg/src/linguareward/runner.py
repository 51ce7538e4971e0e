"""Experiment orchestration: training runs, deterministic rollouts, comparisons.

Every run writes a manifest with the full config echo, seed derivation, and
backend identifiers, so an output directory is sufficient to re-run the
experiment exactly.  Evaluation rollout ``i`` always uses seed ``base + i``;
aggregate statistics are therefore invariant to evaluation order.
"""

from __future__ import annotations

import json
import subprocess
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from .config import ConfigError, ExperimentConfig
from .environments import BurgersEnv, FluidTraceEnv, PendulumEnv
from .environments.fluid import AffineActionMap, default_trace_path, read_trace_csv
from .ppo.train import deterministic_action, load_checkpoint, sample_action, train
from .semantic_reward import SemanticEnv, SemanticRewardSpec, wrap_env
from .stats import correlate_rollout
from .trajectory import Trajectory, TrajectoryStep

FINAL_CHECKPOINT = "ckpt_final"


def build_env(config: ExperimentConfig):
    """The plain (raw-reward) environment for a config."""
    if config.task == "pendulum":
        return PendulumEnv()
    if config.task == "burgers":
        return BurgersEnv()
    trace_path = config.task_options.trace_path or default_trace_path()
    trace = read_trace_csv(trace_path)
    action_map = AffineActionMap(config.task_options.xi_low, config.task_options.xi_high)
    return FluidTraceEnv(trace, action_map)


def build_semantic_spec(config: ExperimentConfig) -> SemanticRewardSpec:
    return SemanticRewardSpec.create(config.task, config.embedder)


def build_training_env(config: ExperimentConfig):
    env = build_env(config)
    if config.reward_mode == "semantic":
        return wrap_env(env, build_semantic_spec(config))
    return env


def git_describe() -> str:
    try:
        out = subprocess.run(
            ["git", "describe", "--always", "--dirty"],
            capture_output=True,
            text=True,
            timeout=10,
        )
        return out.stdout.strip() if out.returncode == 0 else "unknown"
    except OSError:
        return "unknown"


def write_manifest(config: ExperimentConfig, out_dir: Path) -> None:
    manifest = {
        "config": config.to_dict(),
        "git_describe": git_describe(),
        "backend": asdict(config.embedder),
        "seed_derivation": "episode seeds from SplitMix64(ppo.seed); eval rollout i uses eval.base_seed + i",
    }
    with open(out_dir / "manifest.json", "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2)
        fh.write("\n")


def run_training(config: ExperimentConfig):
    """Train per config; writes manifest, JSONL log, and checkpoints."""
    out_dir = Path(config.output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    write_manifest(config, out_dir)
    env = build_training_env(config)
    params, records = train(
        env,
        config.reward_mode,
        config.ppo,
        log_path=out_dir / "train_log.jsonl",
        checkpoint_dir=out_dir,
        checkpoint_interval_updates=config.checkpoint_interval_updates,
        run_config=config.to_dict(),
    )
    return params, records


def run_rollout(env, params, seed: int, deterministic: bool = True, meta: dict | None = None) -> Trajectory:
    """One full episode; the policy mean is used unless ``deterministic=False``."""
    rng = np.random.default_rng(seed)
    obs = env.reset(seed)
    steps: list[TrajectoryStep] = []
    t = 0
    done = False
    while not done:
        if deterministic:
            action = deterministic_action(params, obs, env.action_low, env.action_high)
        else:
            action, _, _ = sample_action(params, obs, rng)
        result = env.step(action)
        if isinstance(env, SemanticEnv):
            raw = result.metrics["raw_reward"]
            sem = result.reward
        else:
            raw = result.reward
            sem = None
        steps.append(
            TrajectoryStep(
                t=t,
                obs=[float(v) for v in np.asarray(obs).reshape(-1)],
                action=[float(v) for v in np.asarray(action).reshape(-1)],
                raw_reward=float(raw),
                semantic_reward=None if sem is None else float(sem),
                sentence=result.sentence,
                metrics={k: float(v) for k, v in result.metrics.items() if k != "raw_reward"},
            )
        )
        obs = result.observation
        done = result.done
        t += 1
    base_meta = {"seed": seed, "deterministic": deterministic, "episode_length": len(steps)}
    if meta:
        base_meta.update(meta)
    return Trajectory(meta=base_meta, steps=steps)


def load_policy_for_env(checkpoint_path, env):
    """Load a checkpoint and verify its shapes against the environment."""
    params, meta = load_checkpoint(checkpoint_path)
    w1 = params.get("actor.w1")
    w_out = params.get("actor.w_out")
    if w1 is None or w_out is None:
        raise ValueError(f"{checkpoint_path}: not a policy checkpoint (missing actor tensors)")
    if w1.shape[0] != env.observation_dim or w_out.shape[1] != env.action_dim:
        raise ValueError(
            f"{checkpoint_path}: checkpoint expects obs_dim={w1.shape[0]}, "
            f"action_dim={w_out.shape[1]}; environment has obs_dim={env.observation_dim}, "
            f"action_dim={env.action_dim}"
        )
    return params, meta


@dataclass(frozen=True)
class RewardStats:
    mean: float
    std: float

    def to_dict(self) -> dict:
        return {"mean": self.mean, "std": self.std}


@dataclass(frozen=True)
class ComparisonRow:
    """One Table-style row: correlations plus raw-reward performance of both policies."""

    task: str
    mean_tau: float | None
    mean_rho: float | None
    semantic_policy_raw_reward: RewardStats
    baseline_policy_raw_reward: RewardStats

    def to_dict(self) -> dict:
        return {
            "task": self.task,
            "mean_tau": self.mean_tau,
            "mean_rho": self.mean_rho,
            "semantic_policy_raw_reward": self.semantic_policy_raw_reward.to_dict(),
            "baseline_policy_raw_reward": self.baseline_policy_raw_reward.to_dict(),
        }


COMPARISON_CSV_HEADER = (
    "task,mean_tau,mean_rho,"
    "semantic_policy_raw_reward_mean,semantic_policy_raw_reward_std,"
    "baseline_policy_raw_reward_mean,baseline_policy_raw_reward_std"
)


def write_comparison(row: ComparisonRow, json_path, csv_path) -> None:
    with open(json_path, "w", encoding="utf-8") as fh:
        json.dump(row.to_dict(), fh, indent=2)
        fh.write("\n")
    with open(csv_path, "w", encoding="utf-8") as fh:
        fh.write(COMPARISON_CSV_HEADER + "\n")
        fh.write(
            ",".join(
                [
                    row.task,
                    repr(row.mean_tau) if row.mean_tau is not None else "",
                    repr(row.mean_rho) if row.mean_rho is not None else "",
                    repr(row.semantic_policy_raw_reward.mean),
                    repr(row.semantic_policy_raw_reward.std),
                    repr(row.baseline_policy_raw_reward.mean),
                    repr(row.baseline_policy_raw_reward.std),
                ]
            )
            + "\n"
        )


def read_comparison_json(path) -> ComparisonRow:
    data = json.loads(Path(path).read_text(encoding="utf-8"))
    return ComparisonRow(
        task=data["task"],
        mean_tau=data["mean_tau"],
        mean_rho=data["mean_rho"],
        semantic_policy_raw_reward=RewardStats(**data["semantic_policy_raw_reward"]),
        baseline_policy_raw_reward=RewardStats(**data["baseline_policy_raw_reward"]),
    )


def _final_checkpoint(config: ExperimentConfig) -> Path:
    return Path(config.output_dir) / (FINAL_CHECKPOINT + ".npz")


def compare(
    config_semantic: ExperimentConfig,
    config_raw: ExperimentConfig,
    train_if_missing: bool = False,
) -> ComparisonRow:
    """Paired-seed evaluation of a semantic-PPO policy against a raw-PPO baseline.

    Both policies are evaluated with deterministic rollouts against the RAW
    reward on the same eval seeds; correlations are computed per semantic
    rollout between its semantic and raw channels, then averaged.
    """
    if config_semantic.task != config_raw.task:
        raise ConfigError(
            f"task mismatch: {config_semantic.task!r} vs {config_raw.task!r}"
        )
    if config_semantic.reward_mode != "semantic" or config_raw.reward_mode != "raw":
        raise ConfigError("compare expects (semantic config, raw config) in that order")
    for cfg in (config_semantic, config_raw):
        if not _final_checkpoint(cfg).exists():
            if train_if_missing:
                run_training(cfg)
            else:
                raise ConfigError(
                    f"checkpoint {_final_checkpoint(cfg)} missing; train first or pass train_if_missing"
                )

    sem_spec = build_semantic_spec(config_semantic)
    sem_env = wrap_env(build_env(config_semantic), sem_spec)
    raw_env = build_env(config_raw)
    sem_params, _ = load_policy_for_env(_final_checkpoint(config_semantic), sem_env)
    raw_params, _ = load_policy_for_env(_final_checkpoint(config_raw), raw_env)

    n = config_semantic.eval.n_rollouts
    base = config_semantic.eval.base_seed
    sem_totals, raw_totals, taus, rhos = [], [], [], []
    for i in range(n):
        seed = base + i
        sem_traj = run_rollout(sem_env, sem_params, seed)
        raw_traj = run_rollout(raw_env, raw_params, seed)
        sem_totals.append(float(np.sum(sem_traj.channel("raw_reward"))))
        raw_totals.append(float(np.sum(raw_traj.channel("raw_reward"))))
        report = correlate_rollout(sem_traj, "semantic_reward", "raw_reward")
        if report.tau is not None:
            taus.append(report.tau)
        if report.rho is not None:
            rhos.append(report.rho)

    return ComparisonRow(
        task=config_semantic.task,
        mean_tau=float(np.mean(taus)) if taus else None,
        mean_rho=float(np.mean(rhos)) if rhos else None,
        semantic_policy_raw_reward=RewardStats(
            mean=float(np.mean(sem_totals)), std=float(np.std(sem_totals))
        ),
        baseline_policy_raw_reward=RewardStats(
            mean=float(np.mean(raw_totals)), std=float(np.std(raw_totals))
        ),
    )
