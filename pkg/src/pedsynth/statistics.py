"""Summary statistics of a real scene: crowd size and walking speed."""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Mapping, Sequence

import numpy as np

from pedsynth.io import SceneDataset, Trajectory


@dataclass
class SceneStatistics:
    """Statistics that drive the sampler.

    Attributes:
        K: number of pedestrians with at least two observations.
        mu_p: mean number of pedestrians per annotated frame.
        var_p: population variance of the per-frame pedestrian count.
        mean_speeds: ped_id -> mean step speed in m/s.
        var_s: pooled within-pedestrian variance of step speeds.
        per_step_speeds: ped_id -> step speeds in m/s.
    """

    K: int
    mu_p: float
    var_p: float
    mean_speeds: dict[int, float]
    var_s: float
    per_step_speeds: dict[int, np.ndarray]

    @property
    def sigma_p(self) -> float:
        return float(np.sqrt(self.var_p))

    @property
    def sigma_s(self) -> float:
        return float(np.sqrt(self.var_s))

    @cached_property
    def speed_pool(self) -> np.ndarray:
        """Mean speeds ordered by ped_id."""
        return np.array([self.mean_speeds[k] for k in sorted(self.mean_speeds)], dtype=float)


def step_speeds(traj: Trajectory | np.ndarray, dt: float) -> np.ndarray:
    """Speeds between consecutive positions, ``|x[t+1] - x[t]| / dt``."""
    pos = traj.positions if isinstance(traj, Trajectory) else np.asarray(traj, dtype=float)
    if len(pos) < 2:
        raise ValueError("step speeds need at least 2 positions")
    if not dt > 0:
        raise ValueError(f"dt must be positive, got {dt}")
    step = np.diff(pos, axis=0)
    return np.hypot(step[:, 0], step[:, 1]) / dt


def frame_count_stats(data: SceneDataset) -> tuple[float, float]:
    """Mean and population variance of the pedestrian count over annotated frames."""
    if len(data) == 0:
        raise ValueError("frame counts of an empty dataset are undefined")
    _, counts = np.unique(data.frames, return_counts=True)
    return float(counts.mean()), float(counts.var())


def pooled_speed_variance(
    per_step_speeds: Mapping[int, Sequence[float]], pooling: str = "within"
) -> float:
    """Speed variance shared by all pedestrians.

    With ``pooling="within"`` (default) this is the pooled within-group
    sample variance, ``sum_k sum_t (s_tk - mean_k)^2 / sum_k (n_k - 1)``;
    pedestrians with a single speed sample contribute nothing. With
    ``pooling="global"`` it is the sample variance of all speeds flattened
    into one list.
    """
    groups = [np.asarray(per_step_speeds[k], dtype=float) for k in sorted(per_step_speeds)]
    if pooling == "global":
        flat = np.concatenate(groups) if groups else np.empty(0)
        if len(flat) < 2:
            raise ValueError("global speed variance needs at least 2 speed samples")
        return float(flat.var(ddof=1))
    if pooling != "within":
        raise ValueError(f"unknown pooling {pooling!r}")
    ss, dof = 0.0, 0
    for s in groups:
        if len(s) < 2:
            continue
        ss += float(((s - s.mean()) ** 2).sum())
        dof += len(s) - 1
    if dof == 0:
        raise ValueError("pooled speed variance needs a pedestrian with at least 2 speed samples")
    return ss / dof


def compute_statistics(data: SceneDataset, pooling: str = "within") -> SceneStatistics:
    mu_p, var_p = frame_count_stats(data)
    speeds = {t.ped_id: step_speeds(t, data.dt) for t in data.trajectories()}
    return SceneStatistics(
        K=len(speeds),
        mu_p=mu_p,
        var_p=var_p,
        mean_speeds={k: float(s.mean()) for k, s in speeds.items()},
        var_s=pooled_speed_variance(speeds, pooling),
        per_step_speeds=speeds,
    )
