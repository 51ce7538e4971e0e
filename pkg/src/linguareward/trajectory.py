"""Per-step trajectory records and their JSON Lines serialization.

File layout: the first line is a metadata object (``{"meta": {...}}``); every
following line is one step with keys ``t``, ``obs``, ``action``,
``raw_reward``, ``semantic_reward``, ``sentence``, and ``metrics`` (the
environment's named scalars, e.g. theta/theta_dot, l2, or cp).  Floats are
serialized with shortest round-trip representation, so files re-read
losslessly.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np


@dataclass
class TrajectoryStep:
    t: int
    obs: list[float]
    action: list[float]
    raw_reward: float
    semantic_reward: float | None
    sentence: str | None
    metrics: dict[str, float] = field(default_factory=dict)


@dataclass
class Trajectory:
    meta: dict
    steps: list[TrajectoryStep]

    def __len__(self) -> int:
        return len(self.steps)

    def available_channels(self) -> list[str]:
        names = ["raw_reward", "semantic_reward"]
        if self.steps:
            for key in self.steps[0].metrics:
                names.append(key)
                names.append(f"abs_{key}")
        return names

    def channel(self, name: str) -> np.ndarray:
        """Per-step values of a named channel.

        ``raw_reward`` / ``semantic_reward`` address the reward fields; any
        metric key addresses ``metrics``; an ``abs_`` prefix takes absolute
        values (e.g. ``abs_cp``).
        """
        if name == "raw_reward":
            return np.array([s.raw_reward for s in self.steps], dtype=np.float64)
        if name == "semantic_reward":
            vals = [s.semantic_reward for s in self.steps]
            if any(v is None for v in vals):
                raise KeyError("trajectory has no semantic_reward channel")
            return np.array(vals, dtype=np.float64)
        base = name[4:] if name.startswith("abs_") else name
        if self.steps and base in self.steps[0].metrics:
            vals = np.array([s.metrics[base] for s in self.steps], dtype=np.float64)
            return np.abs(vals) if name.startswith("abs_") else vals
        raise KeyError(
            f"unknown channel {name!r}; available: {', '.join(self.available_channels())}"
        )


def write_trajectory(path, trajectory: Trajectory) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(json.dumps({"meta": trajectory.meta}) + "\n")
        for s in trajectory.steps:
            fh.write(
                json.dumps(
                    {
                        "t": s.t,
                        "obs": s.obs,
                        "action": s.action,
                        "raw_reward": s.raw_reward,
                        "semantic_reward": s.semantic_reward,
                        "sentence": s.sentence,
                        "metrics": s.metrics,
                    }
                )
                + "\n"
            )


def read_trajectory(path) -> Trajectory:
    with open(path, encoding="utf-8") as fh:
        lines = [line for line in fh if line.strip()]
    if not lines:
        raise ValueError(f"{path}: empty trajectory file")
    header = json.loads(lines[0])
    if "meta" not in header:
        raise ValueError(f"{path}: first line must be the metadata object")
    steps = []
    for line in lines[1:]:
        row = json.loads(line)
        steps.append(
            TrajectoryStep(
                t=row["t"],
                obs=row["obs"],
                action=row["action"],
                raw_reward=row["raw_reward"],
                semantic_reward=row["semantic_reward"],
                sentence=row["sentence"],
                metrics=row.get("metrics", {}),
            )
        )
    return Trajectory(meta=header["meta"], steps=steps)
