"""Fixed-length rollout storage and generalized advantage estimation."""

from __future__ import annotations

import numpy as np


class RolloutBuffer:
    """Per-step arrays for one on-policy rollout of fixed length.

    ``compute_gae`` evaluates the TD-residual recursion
    ``A_t = delta_t + gamma*lambda*(1 - done_t)*A_{t+1}`` with
    ``delta_t = r_t + gamma*(1 - done_t)*V(s_{t+1}) - V(s_t)``; done flags
    zero out bootstrapping across episode boundaries.  Returns are
    ``A_t + V(s_t)``, the regression targets for the value function.
    """

    def __init__(self, capacity: int, obs_dim: int, action_dim: int):
        self.capacity = capacity
        self.observations = np.zeros((capacity, obs_dim))
        self.actions = np.zeros((capacity, action_dim))
        self.log_probs = np.zeros(capacity)
        self.values = np.zeros(capacity)
        self.rewards = np.zeros(capacity)
        self.dones = np.zeros(capacity, dtype=bool)
        self.advantages = np.zeros(capacity)
        self.returns = np.zeros(capacity)
        self.size = 0

    @property
    def full(self) -> bool:
        return self.size >= self.capacity

    def reset(self) -> None:
        self.size = 0

    def add(self, obs, action, log_prob: float, value: float, reward: float, done: bool) -> None:
        if self.full:
            raise RuntimeError("rollout buffer is full")
        i = self.size
        self.observations[i] = obs
        self.actions[i] = action
        self.log_probs[i] = log_prob
        self.values[i] = value
        self.rewards[i] = reward
        self.dones[i] = done
        self.size += 1

    def compute_gae(self, last_value: float, gamma: float, lam: float):
        """Fill and return (advantages, returns) for the stored steps.

        ``last_value`` bootstraps the step after the buffer when the rollout
        ends mid-episode; it is ignored when the final stored step is done.
        """
        if not self.full:
            raise RuntimeError("rollout buffer must be full before computing GAE")
        advantages, returns = compute_gae(
            self.rewards, self.values, self.dones, last_value, gamma, lam
        )
        self.advantages = advantages
        self.returns = returns
        return advantages, returns


def compute_gae(
    rewards: np.ndarray,
    values: np.ndarray,
    dones: np.ndarray,
    last_value: float,
    gamma: float,
    lam: float,
):
    """Recursive GAE over a flat array of steps; returns (advantages, returns)."""
    n = len(rewards)
    advantages = np.zeros(n)
    gae = 0.0
    for t in range(n - 1, -1, -1):
        not_done = 0.0 if dones[t] else 1.0
        next_value = last_value if t == n - 1 else values[t + 1]
        delta = rewards[t] + gamma * not_done * next_value - values[t]
        gae = delta + gamma * lam * not_done * gae
        advantages[t] = gae
    return advantages, advantages + values
