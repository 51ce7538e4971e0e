"""Trace-replay environment for the rotating-cylinder drag task.

No flow solver runs here: the environment replays a table of recorded
responses keyed by (control step, spin command xi).  30 control steps cover
the nondimensional time window (2.0, 3.6] after the uncontrolled warm-up;
each row stores the propulsive power coefficient cp measured for that step
and command.  Actions in [-1, 1] map affinely onto a xi range and are matched
to the nearest recorded command; raw reward is -|cp|.

Traces ship as repository fixtures (synthetic by default) and load from CSV
with header ``step,t_over_TU,xi,cp``, so user-supplied solver exports drop in
unchanged.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .base import StepResult, TraceLookupError

HORIZON = 30
WARMUP_TIME = 2.0
FINAL_TIME = 3.6
TRACE_HEADER = ("step", "t_over_TU", "xi", "cp")


@dataclass(frozen=True)
class FluidTraceRecord:
    step: int
    time: float
    xi: float
    cp: float


@dataclass(frozen=True)
class AffineActionMap:
    """Maps a policy action in [-1, 1] onto a spin command in [xi_low, xi_high]."""

    xi_low: float = 0.0
    xi_high: float = 6.0

    def __call__(self, action: float) -> float:
        a = min(max(float(action), -1.0), 1.0)
        return self.xi_low + 0.5 * (a + 1.0) * (self.xi_high - self.xi_low)


def write_trace_csv(path, records: list[FluidTraceRecord]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(TRACE_HEADER)
        for r in records:
            writer.writerow([r.step, repr(r.time), repr(r.xi), repr(r.cp)])


def read_trace_csv(path) -> list[FluidTraceRecord]:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = tuple(next(reader))
        if header != TRACE_HEADER:
            raise ValueError(f"{path}: expected header {TRACE_HEADER}, got {header}")
        return [
            FluidTraceRecord(step=int(row[0]), time=float(row[1]), xi=float(row[2]), cp=float(row[3]))
            for row in reader
            if row
        ]


def synthetic_trace(
    n_xi_levels: int = 13,
    xi_high: float = 6.0,
    uncontrolled_cp: float = 0.4,
    wiggle: float = 0.03,
) -> list[FluidTraceRecord]:
    """Plausible synthetic response table.

    Uncontrolled drag sits near ``uncontrolled_cp``; increasing spin reduces
    cp roughly linearly, crossing zero and producing slight thrust at high
    commands, plus a small step-dependent wiggle.  Monotone in xi per step.
    """
    records = []
    xi_levels = [xi_high * i / (n_xi_levels - 1) for i in range(n_xi_levels)]
    for step in range(HORIZON):
        t = WARMUP_TIME + (step + 1) * (FINAL_TIME - WARMUP_TIME) / HORIZON
        for xi in xi_levels:
            cp = uncontrolled_cp * (1.0 - xi / 4.0) + wiggle * math.sin(
                2.0 * math.pi * step / 15.0
            ) * (1.0 - xi / xi_high)
            records.append(FluidTraceRecord(step=step, time=t, xi=xi, cp=cp))
    return records


def default_trace_path() -> Path:
    return Path(__file__).resolve().parent.parent / "fixtures" / "fluid_trace_synthetic.csv"


class FluidTraceEnv:
    """Episodic replay of a (step, xi) -> cp response table.

    Observation is (previous cp, current xi); raw reward is -|cp|; done after
    30 steps.  The warm-up window is excluded from the trace by construction.
    """

    observation_dim = 2
    action_dim = 1
    action_low = -1.0
    action_high = 1.0
    horizon = HORIZON
    metric_names = ("cp", "xi")

    def __init__(self, trace: list[FluidTraceRecord], action_to_xi: AffineActionMap | None = None):
        self.action_to_xi = action_to_xi or AffineActionMap()
        self._by_step: dict[int, list[FluidTraceRecord]] = {}
        for rec in trace:
            self._by_step.setdefault(rec.step, []).append(rec)
        self._validate()
        self._t = 0
        self._prev_cp = 0.0
        self._prev_xi = 0.0
        self._started = False

    def _validate(self) -> None:
        missing = [s for s in range(HORIZON) if s not in self._by_step]
        if missing:
            raise TraceLookupError(f"trace missing control steps {missing}")
        times = []
        for step in range(HORIZON):
            recs = self._by_step[step]
            step_times = {r.time for r in recs}
            if len(step_times) != 1:
                raise ValueError(f"step {step} carries multiple times {sorted(step_times)}")
            t = step_times.pop()
            if not (WARMUP_TIME < t <= FINAL_TIME):
                raise ValueError(
                    f"step {step} at t={t} outside the control window ({WARMUP_TIME}, {FINAL_TIME}]"
                )
            times.append(t)
            recs.sort(key=lambda r: r.xi)
        if any(t1 >= t2 for t1, t2 in zip(times, times[1:])):
            raise ValueError("trace times must be strictly increasing in step")

    def reset(self, seed: int | None = None) -> np.ndarray:
        # replay is deterministic; seed accepted for interface uniformity
        self._t = 0
        self._prev_cp = 0.0
        self._prev_xi = 0.0
        self._started = True
        return np.array([self._prev_cp, self._prev_xi], dtype=np.float64)

    def step(self, action) -> StepResult:
        if not self._started:
            raise RuntimeError("reset() must be called before step()")
        if self._t >= self.horizon:
            raise RuntimeError("episode is done; call reset()")
        xi_cmd = self.action_to_xi(float(np.asarray(action).reshape(-1)[0]))
        recs = self._by_step.get(self._t)
        if not recs:
            raise TraceLookupError(f"trace has no records for step {self._t}")
        rec = min(recs, key=lambda r: (abs(r.xi - xi_cmd), r.xi))
        self._t += 1
        self._prev_cp = rec.cp
        self._prev_xi = rec.xi
        return StepResult(
            observation=np.array([rec.cp, rec.xi], dtype=np.float64),
            reward=-abs(rec.cp),
            done=self._t >= self.horizon,
            metrics={"cp": rec.cp, "xi": rec.xi},
        )
