"""State describers: deterministic numeric-state -> sentence templates.

Every number is rendered with exactly two decimal places (finer precision
makes embeddings overly sensitive; coarser is too ambiguous), which also
makes the sentence space finite and cacheable.  The rendered strings are
canonical: the Greek letters are the literal characters below, with no ASCII
fallback, so caches and cross-process runs agree byte-for-byte.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from decimal import ROUND_HALF_UP, Decimal, localcontext
from typing import Callable, Mapping

THETA = "θ"
THETA_DOT = "θ̇"

_PENDULUM_TEMPLATE = "The state is at " + THETA + " = {}, " + THETA_DOT + " = {}."
_BURGERS_TEMPLATE = "State L2 level: {}. L2 = {}."
_FLUID_TEMPLATE = "{}. Cp2 = {}."


def round2(x: float) -> str:
    """Fixed-point rendering with two decimals, ties away from zero.

    Operates on the float's shortest decimal representation, so
    ``round2(4.005) == "4.01"`` even though the binary value sits slightly
    below 4.005.  "-0.00" is normalized to "0.00".
    """
    x = float(x)
    if not math.isfinite(x):
        raise ValueError(f"round2 requires a finite value, got {x!r}")
    with localcontext() as ctx:
        ctx.prec = 60
        q = Decimal(repr(x)).quantize(Decimal("0.01"), rounding=ROUND_HALF_UP)
    s = format(q, "f")
    return "0.00" if s == "-0.00" else s


@dataclass(frozen=True)
class BucketTable:
    """Ordered [lower, upper) intervals labelling a non-negative metric.

    Intervals must be contiguous, start at 0, and end at +inf, so every
    non-negative value falls in exactly one bucket.
    """

    metric: str
    bins: tuple[tuple[float, float, str], ...]

    def __post_init__(self):
        if not self.bins:
            raise ValueError("bucket table must be non-empty")
        if self.bins[0][0] != 0.0:
            raise ValueError("first bucket must start at 0")
        if not math.isinf(self.bins[-1][1]):
            raise ValueError("last bucket must extend to +inf")
        for (_, hi, _), (lo, _, _) in zip(self.bins, self.bins[1:]):
            if hi != lo:
                raise ValueError("buckets must be contiguous and non-overlapping")

    def label(self, value: float) -> str:
        if not math.isfinite(value) or value < 0:
            raise ValueError(f"bucket lookup requires a finite value >= 0, got {value!r}")
        for lo, hi, label in self.bins:
            if lo <= value < hi:
                return label
        raise AssertionError("unreachable: buckets cover [0, inf)")


BURGERS_BUCKETS = BucketTable(
    metric="l2",
    bins=(
        (0.0, 0.2, "Level A"),
        (0.2, 0.3, "Level B"),
        (0.3, 0.4, "Level C"),
        (0.4, 0.5, "Level D"),
        (0.5, 0.6, "Level E"),
        (0.6, 0.7, "excellent"),
        (0.7, 0.8, "better"),
        (0.8, 0.9, "good"),
        (0.9, 1.0, "normal"),
        (1.0, 1.1, "bad"),
        (1.1, math.inf, "collapse"),
    ),
)

FLUID_BUCKETS = BucketTable(
    metric="cp2",
    bins=(
        (0.0, 0.01, "Drag is negligible, well done"),
        (0.01, 0.05, "Drag is minimal with slight resistance"),
        (0.05, 0.10, "Drag is mild but noticeable"),
        (0.10, 0.20, "Drag is moderate and affecting motion"),
        (0.20, 0.35, "Drag is strong and significantly slowing flow"),
        (0.35, math.inf, "Severe drag condition detected, flow heavily impeded"),
    ),
)


def describe_pendulum(theta: float, theta_dot: float) -> str:
    """Sentence for a pendulum state; theta in [-pi, pi], theta_dot in [-8, 8]."""
    if not (-math.pi <= theta <= math.pi):
        raise ValueError(f"theta must be in [-pi, pi], got {theta!r}")
    if not (-8.0 <= theta_dot <= 8.0):
        raise ValueError(f"theta_dot must be in [-8, 8], got {theta_dot!r}")
    return _PENDULUM_TEMPLATE.format(round2(theta), round2(theta_dot))


def pendulum_goal() -> str:
    """Goal sentence: the state template rendered at the upright equilibrium."""
    return describe_pendulum(0.0, 0.0)


def describe_burgers(l2: float) -> str:
    """Sentence for a Burgers state, bucketed by the sensor L2 norm."""
    if not math.isfinite(l2) or l2 < 0:
        raise ValueError(f"l2 must be finite and >= 0, got {l2!r}")
    return _BURGERS_TEMPLATE.format(BURGERS_BUCKETS.label(l2), round2(l2))


def burgers_goal() -> str:
    """Goal sentence: best bucket at zero energy."""
    return _BURGERS_TEMPLATE.format("Level A", round2(0.0))


def describe_fluid(cp: float) -> str:
    """Sentence for a fluid state, bucketed by the squared power coefficient."""
    if not math.isfinite(cp):
        raise ValueError(f"cp must be finite, got {cp!r}")
    cp2 = cp * cp
    return _FLUID_TEMPLATE.format(FLUID_BUCKETS.label(cp2), round2(cp2))


def fluid_goal() -> str:
    """Goal sentence: negligible drag at zero power coefficient."""
    return describe_fluid(0.0)


@dataclass(frozen=True)
class TaskDescriber:
    """Bundles a task's state describer, goal sentence, and required metrics."""

    task: str
    required_metrics: tuple[str, ...]
    _describe: Callable[..., str]
    _goal: Callable[[], str]

    def describe(self, metrics: Mapping[str, float]) -> str:
        missing = [k for k in self.required_metrics if k not in metrics]
        if missing:
            raise KeyError(f"metrics missing keys {missing} required by task {self.task!r}")
        return self._describe(*(metrics[k] for k in self.required_metrics))

    def goal(self) -> str:
        return self._goal()


TASK_DESCRIBERS: dict[str, TaskDescriber] = {
    "pendulum": TaskDescriber("pendulum", ("theta", "theta_dot"), describe_pendulum, pendulum_goal),
    "burgers": TaskDescriber("burgers", ("l2",), describe_burgers, burgers_goal),
    "fluid": TaskDescriber("fluid", ("cp",), describe_fluid, fluid_goal),
}
