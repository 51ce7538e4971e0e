"""Torque-limited pendulum swing-up with the classic quadratic state cost.

Dynamics are the standard frictionless rigid pendulum integrated with
semi-implicit Euler (velocity first, then angle), g=10, m=1, l=1, dt=0.05,
torque clamped to [-2, 2], angular velocity clamped to [-8, 8], angle wrapped
to [-pi, pi].  The reward uses the pre-step state and the clamped torque:
-(theta^2 + 0.1*theta_dot^2 + 0.001*u^2).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..rng import SplitMix64
from .base import StepResult

GRAVITY = 10.0
MASS = 1.0
LENGTH = 1.0
DT = 0.05
MAX_TORQUE = 2.0
MAX_SPEED = 8.0
HORIZON = 200


def wrap_angle(theta: float) -> float:
    """Wrap an angle to [-pi, pi]."""
    return (theta + math.pi) % (2.0 * math.pi) - math.pi


@dataclass
class PendulumState:
    theta: float
    theta_dot: float


def pendulum_reset(seed: int) -> PendulumState:
    """Seeded initial state: theta ~ U[-pi, pi], theta_dot ~ U[-1, 1]."""
    rng = SplitMix64(seed)
    theta = rng.uniform(-math.pi, math.pi)
    theta_dot = rng.uniform(-1.0, 1.0)
    return PendulumState(theta=theta, theta_dot=theta_dot)


def pendulum_step(state: PendulumState, torque: float) -> tuple[PendulumState, float]:
    """One dynamics step; returns (next state, raw reward)."""
    if not math.isfinite(torque):
        raise ValueError(f"torque must be finite, got {torque!r}")
    u = min(max(torque, -MAX_TORQUE), MAX_TORQUE)
    theta = wrap_angle(state.theta)
    theta_dot = state.theta_dot
    reward = -(theta**2 + 0.1 * theta_dot**2 + 0.001 * u**2)

    accel = 3.0 * GRAVITY / (2.0 * LENGTH) * math.sin(theta) + 3.0 / (MASS * LENGTH**2) * u
    new_theta_dot = theta_dot + accel * DT
    new_theta_dot = min(max(new_theta_dot, -MAX_SPEED), MAX_SPEED)
    new_theta = wrap_angle(theta + new_theta_dot * DT)
    return PendulumState(theta=new_theta, theta_dot=new_theta_dot), reward


class PendulumEnv:
    """Episodic pendulum environment; observation is (cos theta, sin theta, theta_dot)."""

    observation_dim = 3
    action_dim = 1
    action_low = -MAX_TORQUE
    action_high = MAX_TORQUE
    horizon = HORIZON
    metric_names = ("theta", "theta_dot")

    def __init__(self):
        self._state: PendulumState | None = None
        self._t = 0

    @property
    def state(self) -> PendulumState:
        if self._state is None:
            raise RuntimeError("reset() must be called before accessing state")
        return self._state

    def reset(self, seed: int) -> np.ndarray:
        self._state = pendulum_reset(seed)
        self._t = 0
        return self._observe()

    def step(self, action) -> StepResult:
        if self._state is None:
            raise RuntimeError("reset() must be called before step()")
        if self._t >= self.horizon:
            raise RuntimeError("episode is done; call reset()")
        torque = float(np.asarray(action).reshape(-1)[0])
        self._state, reward = pendulum_step(self._state, torque)
        self._t += 1
        return StepResult(
            observation=self._observe(),
            reward=reward,
            done=self._t >= self.horizon,
            metrics={"theta": self._state.theta, "theta_dot": self._state.theta_dot},
        )

    def _observe(self) -> np.ndarray:
        s = self.state
        return np.array([math.cos(s.theta), math.sin(s.theta), s.theta_dot], dtype=np.float64)
