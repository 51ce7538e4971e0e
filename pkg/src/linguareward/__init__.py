"""linguareward: language-similarity rewards for PPO control tasks.

The reward of a wrapped environment is the cosine similarity between sentence
embeddings of a goal description and of the current state's description.
Ships with three embedding backends (trigram hash, numeric oracle, remote
service client), three tasks (pendulum, 1D Burgers regulation, drag-trace
replay), a self-contained PPO, and rank-correlation analysis utilities.
"""

from .config import ConfigError, EvalConfig, ExperimentConfig, load_experiment_config
from .describer import (
    BURGERS_BUCKETS,
    FLUID_BUCKETS,
    TASK_DESCRIBERS,
    BucketTable,
    burgers_goal,
    describe_burgers,
    describe_fluid,
    describe_pendulum,
    fluid_goal,
    pendulum_goal,
    round2,
)
from .embedding import (
    CachedEmbedder,
    EmbedderSpec,
    EmbeddingCache,
    HashEmbedder,
    NumericOracleEmbedder,
    ProtocolError,
    RemoteEmbedder,
    TransportError,
    cosine,
    embed,
    embed_hash,
    embed_numeric_oracle,
    make_embedder,
)
from .ppo import PPOConfig, train
from .semantic_reward import SemanticEnv, SemanticRewardSpec, semantic_reward, wrap_env
from .stats import CorrelationReport, correlate_rollout, kendall_tau, spearman_rho
from .trajectory import Trajectory, TrajectoryStep, read_trajectory, write_trajectory

__version__ = "0.1.0"

__all__ = [
    "BURGERS_BUCKETS",
    "BucketTable",
    "CachedEmbedder",
    "ConfigError",
    "CorrelationReport",
    "EmbedderSpec",
    "EmbeddingCache",
    "EvalConfig",
    "ExperimentConfig",
    "FLUID_BUCKETS",
    "HashEmbedder",
    "NumericOracleEmbedder",
    "PPOConfig",
    "ProtocolError",
    "RemoteEmbedder",
    "SemanticEnv",
    "SemanticRewardSpec",
    "TASK_DESCRIBERS",
    "Trajectory",
    "TrajectoryStep",
    "TransportError",
    "burgers_goal",
    "correlate_rollout",
    "cosine",
    "describe_burgers",
    "describe_fluid",
    "describe_pendulum",
    "embed",
    "embed_hash",
    "embed_numeric_oracle",
    "fluid_goal",
    "kendall_tau",
    "load_experiment_config",
    "make_embedder",
    "pendulum_goal",
    "read_trajectory",
    "round2",
    "semantic_reward",
    "spearman_rho",
    "train",
    "wrap_env",
    "write_trajectory",
]
