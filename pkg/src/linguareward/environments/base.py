"""Common step-result container and environment errors."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


class SolverBlowupError(RuntimeError):
    """Numerical solver produced NaN/Inf or violated its stability guard."""


class TraceLookupError(LookupError):
    """A replay trace is missing the queried (step, command) cell."""


@dataclass
class StepResult:
    """One transition: observation, training reward, termination, and the
    named scalar quantities describers and loggers need."""

    observation: np.ndarray
    reward: float
    done: bool
    metrics: dict[str, float] = field(default_factory=dict)
    sentence: str | None = None
