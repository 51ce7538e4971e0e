"""Language-similarity rewards: describe the state, embed, compare to the goal.

The training reward of a wrapped environment is the cosine similarity between
the embedding of the goal sentence and the embedding of the current state's
sentence.  Wrapping changes only the reward channel: observations, dynamics,
and termination pass through untouched, and the classical reward is kept in
``metrics["raw_reward"]`` so both channels stay available for correlation
analysis.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from .describer import TASK_DESCRIBERS, TaskDescriber
from .embedding import EmbedderSpec, cosine, make_embedder
from .environments.base import StepResult


@dataclass
class SemanticRewardSpec:
    """Goal sentence, its precomputed embedding, and the describer/embedder pair.

    The goal embedding is computed once at construction and verified against a
    fresh embedding of the goal sentence, so a stale or mismatched vector
    cannot slip in.
    """

    goal_sentence: str
    goal_embedding: np.ndarray
    embedder: object
    describer: TaskDescriber
    embedder_spec: EmbedderSpec | None = field(default=None, repr=False)

    def __post_init__(self):
        recomputed = self.embedder.embed([self.goal_sentence])[0]
        if not np.array_equal(np.asarray(self.goal_embedding), np.asarray(recomputed)):
            raise ValueError("goal_embedding does not match embed(goal_sentence)")

    @classmethod
    def create(cls, task: str, embedder_spec: EmbedderSpec) -> "SemanticRewardSpec":
        if task not in TASK_DESCRIBERS:
            raise ValueError(f"unknown task {task!r}; expected one of {sorted(TASK_DESCRIBERS)}")
        describer = TASK_DESCRIBERS[task]
        embedder = make_embedder(embedder_spec)
        goal = describer.goal()
        goal_embedding = embedder.embed([goal])[0]
        return cls(
            goal_sentence=goal,
            goal_embedding=goal_embedding,
            embedder=embedder,
            describer=describer,
            embedder_spec=embedder_spec,
        )


def reward_for_sentence(spec: SemanticRewardSpec, sentence: str) -> float:
    """Cosine similarity of a state sentence to the goal, in [-1, 1].

    A sentence identical to the goal sentence scores exactly 1.0 (the cosine
    of a unit vector with itself, short-circuited so the maximum is attained
    without floating-point slack).
    """
    if sentence == spec.goal_sentence:
        return 1.0
    vec = spec.embedder.embed([sentence])[0]
    return cosine(spec.goal_embedding, vec)


def semantic_reward(spec: SemanticRewardSpec, metrics: Mapping[str, float]) -> float:
    """Semantic reward for a state given its describer metrics."""
    return reward_for_sentence(spec, spec.describer.describe(metrics))


class SemanticEnv:
    """Environment wrapper replacing the reward channel with the semantic reward."""

    def __init__(self, env, spec: SemanticRewardSpec):
        missing = [k for k in spec.describer.required_metrics if k not in env.metric_names]
        if missing:
            raise ValueError(
                f"environment does not expose metrics {missing} required by "
                f"task {spec.describer.task!r} (has {list(env.metric_names)})"
            )
        self.env = env
        self.spec = spec

    @property
    def observation_dim(self):
        return self.env.observation_dim

    @property
    def action_dim(self):
        return self.env.action_dim

    @property
    def action_low(self):
        return self.env.action_low

    @property
    def action_high(self):
        return self.env.action_high

    @property
    def horizon(self):
        return self.env.horizon

    @property
    def metric_names(self):
        return tuple(self.env.metric_names) + ("raw_reward",)

    def reset(self, seed: int) -> np.ndarray:
        return self.env.reset(seed)

    def step(self, action) -> StepResult:
        inner = self.env.step(action)
        sentence = self.spec.describer.describe(inner.metrics)
        reward = reward_for_sentence(self.spec, sentence)
        metrics = dict(inner.metrics)
        metrics["raw_reward"] = inner.reward
        return StepResult(
            observation=inner.observation,
            reward=reward,
            done=inner.done,
            metrics=metrics,
            sentence=sentence,
        )


def wrap_env(env, spec: SemanticRewardSpec) -> SemanticEnv:
    """Wrap ``env`` so step() returns the semantic reward as the training reward."""
    return SemanticEnv(env, spec)
