"""Self-contained actor-critic PPO with GAE and explained-variance tracking."""

from .buffer import RolloutBuffer, compute_gae
from .networks import (
    actor_forward,
    critic_forward,
    gaussian_entropy,
    gaussian_log_prob,
    init_policy_params,
)
from .train import (
    AdamState,
    PPOConfig,
    TrainingError,
    UpdateMetrics,
    adam_step,
    config_sha256,
    deterministic_action,
    explained_variance,
    load_checkpoint,
    ppo_update,
    read_train_log,
    sample_action,
    save_checkpoint,
    train,
)

__all__ = [
    "AdamState",
    "PPOConfig",
    "RolloutBuffer",
    "TrainingError",
    "UpdateMetrics",
    "actor_forward",
    "adam_step",
    "compute_gae",
    "config_sha256",
    "critic_forward",
    "deterministic_action",
    "explained_variance",
    "gaussian_entropy",
    "gaussian_log_prob",
    "init_policy_params",
    "load_checkpoint",
    "ppo_update",
    "read_train_log",
    "sample_action",
    "save_checkpoint",
    "train",
]
