"""Episodic control environments: pendulum, Burgers regulation, drag-trace replay."""

from .base import SolverBlowupError, StepResult, TraceLookupError
from .burgers import (
    BurgersEnv,
    BurgersState,
    burgers_l2,
    burgers_observe,
    burgers_reset,
    burgers_step,
)
from .fluid import (
    AffineActionMap,
    FluidTraceEnv,
    FluidTraceRecord,
    default_trace_path,
    read_trace_csv,
    synthetic_trace,
    write_trace_csv,
)
from .pendulum import PendulumEnv, PendulumState, pendulum_reset, pendulum_step, wrap_angle

__all__ = [
    "AffineActionMap",
    "BurgersEnv",
    "BurgersState",
    "FluidTraceEnv",
    "FluidTraceRecord",
    "PendulumEnv",
    "PendulumState",
    "SolverBlowupError",
    "StepResult",
    "TraceLookupError",
    "burgers_l2",
    "burgers_observe",
    "burgers_reset",
    "burgers_step",
    "default_trace_path",
    "pendulum_reset",
    "pendulum_step",
    "read_trace_csv",
    "synthetic_trace",
    "wrap_angle",
    "write_trace_csv",
]
