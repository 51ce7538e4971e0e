"""Viscous Burgers regulation on a periodic grid with 8-bump forcing.

du/dt + u du/dx - nu d2u/dx2 = a(x, t), x in [0, 1), nu = 0.001.

The forcing a(x, t) = sum_i a_i(t) phi_i(x) uses the indicator partition of
[0, 1) into 8 equal intervals; coefficients are clamped to [-1, 1] and held
constant over one control interval of 0.01 time units (10 explicit substeps
of dt = 0.001).  Space discretization: conservative upwind flux u^2/2
(upwinded by the sign of the interface-average velocity) plus central second
differences for diffusion.  A CFL guard (max|u| dt/dx <= 0.9) runs every
substep and raises instead of letting the field corrupt silently.

The state observed by policies is 10 equally spaced point samples of u; the
regulation metric (and negated raw reward) is the Euclidean norm of those 10
samples.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..rng import SplitMix64
from .base import SolverBlowupError, StepResult

N_GRID = 128
NU = 0.001
DT_SUBSTEP = 0.001
N_SUBSTEPS = 10
DT_CONTROL = DT_SUBSTEP * N_SUBSTEPS
HORIZON = 100
N_SENSORS = 10
N_ACTUATORS = 8
CFL_LIMIT = 0.9

_DX = 1.0 / N_GRID
SENSOR_INDICES = tuple(int(round(j * N_GRID / N_SENSORS)) for j in range(N_SENSORS))
# cell i belongs to bump support [r/8, (r+1)/8) with r = i // (N/8)
_REGION = np.repeat(np.arange(N_ACTUATORS), N_GRID // N_ACTUATORS)


@dataclass
class BurgersState:
    u: np.ndarray
    t_index: int
    nu: float = NU


def burgers_reset(seed: int) -> BurgersState:
    """Random 3-mode sine initial condition, c_k ~ U[0.3, 0.8], phases U[0, 2pi)."""
    rng = SplitMix64(seed)
    x = np.arange(N_GRID, dtype=np.float64) / N_GRID
    u = np.zeros(N_GRID, dtype=np.float64)
    for k in range(1, 4):
        c = rng.uniform(0.3, 0.8)
        psi = rng.uniform(0.0, 2.0 * math.pi)
        u += c * np.sin(2.0 * math.pi * k * x + psi)
    return BurgersState(u=u, t_index=0)


def _rhs(u: np.ndarray, forcing: np.ndarray, nu: float) -> np.ndarray:
    u_right = np.roll(u, -1)
    interface_avg = 0.5 * (u + u_right)
    # flux at i+1/2: take the upwind side's u^2/2
    flux = np.where(interface_avg > 0.0, 0.5 * u * u, 0.5 * u_right * u_right)
    advection = (flux - np.roll(flux, 1)) / _DX
    diffusion = nu * (u_right - 2.0 * u + np.roll(u, 1)) / (_DX * _DX)
    return -advection + diffusion + forcing


def burgers_step(state: BurgersState, coeffs) -> BurgersState:
    """Advance one control interval with piecewise-constant bump forcing."""
    a = np.clip(np.asarray(coeffs, dtype=np.float64).reshape(-1), -1.0, 1.0)
    if a.shape != (N_ACTUATORS,):
        raise ValueError(f"expected {N_ACTUATORS} control coefficients, got shape {a.shape}")
    forcing = a[_REGION]
    u = state.u
    for _ in range(N_SUBSTEPS):
        cfl = float(np.max(np.abs(u))) * DT_SUBSTEP / _DX
        if not math.isfinite(cfl) or cfl > CFL_LIMIT:
            raise SolverBlowupError(
                f"CFL violation at t_index {state.t_index}: max|u|*dt/dx = {cfl:.4g} > {CFL_LIMIT}"
            )
        u = u + DT_SUBSTEP * _rhs(u, forcing, state.nu)
    if not np.all(np.isfinite(u)):
        raise SolverBlowupError(f"non-finite field after control step {state.t_index}")
    return BurgersState(u=u, t_index=state.t_index + 1, nu=state.nu)


def burgers_observe(state: BurgersState) -> np.ndarray:
    """The 10 equally spaced sensor samples of the field."""
    return state.u[list(SENSOR_INDICES)].copy()


def burgers_l2(obs) -> float:
    """Euclidean norm of the 10 sensor values."""
    obs = np.asarray(obs, dtype=np.float64)
    return float(np.sqrt(np.sum(obs * obs)))


class BurgersEnv:
    """Episodic Burgers regulation; raw reward is -(sensor L2) of the new state."""

    observation_dim = N_SENSORS
    action_dim = N_ACTUATORS
    action_low = -1.0
    action_high = 1.0
    horizon = HORIZON
    metric_names = ("l2",)

    def __init__(self):
        self._state: BurgersState | None = None

    @property
    def state(self) -> BurgersState:
        if self._state is None:
            raise RuntimeError("reset() must be called before accessing state")
        return self._state

    def reset(self, seed: int) -> np.ndarray:
        self._state = burgers_reset(seed)
        return burgers_observe(self._state)

    def step(self, action) -> StepResult:
        if self._state is None:
            raise RuntimeError("reset() must be called before step()")
        if self._state.t_index >= self.horizon:
            raise RuntimeError("episode is done; call reset()")
        self._state = burgers_step(self._state, action)
        obs = burgers_observe(self._state)
        l2 = burgers_l2(obs)
        return StepResult(
            observation=obs,
            reward=-l2,
            done=self._state.t_index >= self.horizon,
            metrics={"l2": l2},
        )
