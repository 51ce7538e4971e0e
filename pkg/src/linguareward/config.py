"""Experiment configuration: a versioned, strictly validated JSON schema.

Unknown keys are rejected everywhere so a typo cannot silently fall back to a
default, and validation runs completely before any compute starts.  Error
messages carry the offending file and key path (or the parser's line/column
for malformed JSON).
"""

from __future__ import annotations

import json
import os
from dataclasses import asdict, dataclass, field
from pathlib import Path

from .embedding import EmbedderSpec
from .ppo.train import PPOConfig

TASKS = ("pendulum", "burgers", "fluid")
REWARD_MODES = ("semantic", "raw")
CONFIG_VERSION = 1

REMOTE_URL_ENV_VAR = "LINGUAREWARD_REMOTE_URL"


class ConfigError(Exception):
    """Invalid experiment configuration (missing file, bad key, bad value)."""


@dataclass(frozen=True)
class EvalConfig:
    n_rollouts: int = 100
    base_seed: int = 10_000

    def __post_init__(self):
        if self.n_rollouts < 0:
            raise ValueError("n_rollouts must be >= 0")


@dataclass(frozen=True)
class TaskOptions:
    """Per-task extras: the fluid task needs a trace file and a spin range."""

    trace_path: str | None = None
    xi_low: float = 0.0
    xi_high: float = 6.0


@dataclass(frozen=True)
class ExperimentConfig:
    task: str
    reward_mode: str
    embedder: EmbedderSpec
    ppo: PPOConfig
    output_dir: str
    eval: EvalConfig = field(default_factory=EvalConfig)
    task_options: TaskOptions = field(default_factory=TaskOptions)
    checkpoint_interval_updates: int | None = None
    version: int = CONFIG_VERSION

    def __post_init__(self):
        if self.task not in TASKS:
            raise ValueError(f"task must be one of {TASKS}")
        if self.reward_mode not in REWARD_MODES:
            raise ValueError(f"reward_mode must be one of {REWARD_MODES}")
        if self.version != CONFIG_VERSION:
            raise ValueError(f"unsupported config version {self.version}")

    def to_dict(self) -> dict:
        d = asdict(self)
        d["embedder"] = asdict(self.embedder)
        d["ppo"] = asdict(self.ppo)
        d["eval"] = asdict(self.eval)
        d["task_options"] = asdict(self.task_options)
        return d


def _build_section(cls, data: dict, path: str, section: str):
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: {section}: expected an object")
    allowed = set(cls.__dataclass_fields__)
    unknown = sorted(set(data) - allowed)
    if unknown:
        raise ConfigError(f"{path}: {section}: unknown keys {unknown} (allowed: {sorted(allowed)})")
    try:
        return cls(**data)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{path}: {section}: {exc}") from exc


def experiment_config_from_dict(data: dict, path: str = "<config>") -> ExperimentConfig:
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: top level must be an object")
    top_allowed = set(ExperimentConfig.__dataclass_fields__)
    unknown = sorted(set(data) - top_allowed)
    if unknown:
        raise ConfigError(f"{path}: unknown keys {unknown} (allowed: {sorted(top_allowed)})")
    for key in ("task", "reward_mode", "embedder", "ppo", "output_dir"):
        if key not in data:
            raise ConfigError(f"{path}: missing required key {key!r}")

    embedder_data = dict(data["embedder"])
    env_url = os.environ.get(REMOTE_URL_ENV_VAR)
    if env_url and embedder_data.get("backend") == "remote":
        embedder_data["remote_url"] = env_url
    embedder = _build_section(EmbedderSpec, embedder_data, path, "embedder")
    ppo = _build_section(PPOConfig, data["ppo"], path, "ppo")
    eval_cfg = _build_section(EvalConfig, data.get("eval", {}), path, "eval")
    task_options = _build_section(TaskOptions, data.get("task_options", {}), path, "task_options")

    try:
        return ExperimentConfig(
            task=data["task"],
            reward_mode=data["reward_mode"],
            embedder=embedder,
            ppo=ppo,
            output_dir=data["output_dir"],
            eval=eval_cfg,
            task_options=task_options,
            checkpoint_interval_updates=data.get("checkpoint_interval_updates"),
            version=data.get("version", CONFIG_VERSION),
        )
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{path}: {exc}") from exc


def load_experiment_config(path) -> ExperimentConfig:
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config not found: {path}")
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    return experiment_config_from_dict(data, str(path))
