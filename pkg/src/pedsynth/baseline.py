"""Noisy constant-velocity predictor used to exercise the metrics end to end."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from pedsynth.io import SceneDataset
from pedsynth.metrics import PredictionSet


@dataclass(frozen=True)
class PredictorConfig:
    observe_len: int = 8
    horizon: int = 8
    J: int = 100
    gamma: float = 0.1
    seed: int = 0

    def __post_init__(self):
        if self.observe_len < 2:
            raise ValueError("observe_len must be at least 2")
        if self.horizon < 1 or self.J < 1:
            raise ValueError("horizon and J must be at least 1")
        if not self.gamma >= 0:
            raise ValueError("gamma must be non-negative")


def predict(dataset: SceneDataset, cfg: PredictorConfig) -> PredictionSet:
    """Predict the ``horizon`` steps after each pedestrian's first ``observe_len`` positions.

    The velocity is the displacement across the observation window divided by
    its duration. Sample ``j`` at future step ``t`` is the extrapolated
    position plus isotropic Gaussian noise with standard deviation
    ``gamma * t``. Noise for a pedestrian comes from a generator keyed by
    ``(seed, ped_id)``. Pedestrians with fewer than ``observe_len + horizon``
    positions are skipped and counted in ``excluded``. The returned set
    carries the true future positions as ground truth.
    """
    need = cfg.observe_len + cfg.horizon
    tracks = dataset.trajectories()
    eligible = [t for t in tracks if len(t) >= need]
    if not eligible:
        raise ValueError(f"no pedestrian has the {need} positions needed to predict")

    dt = dataset.dt
    steps = np.arange(1, cfg.horizon + 1)
    origin = dataset.frame_origin
    ped_ids, frames, samples, truth = [], [], [], []
    for traj in eligible:
        obs = traj.positions[: cfg.observe_len]
        v = (obs[-1] - obs[0]) / ((cfg.observe_len - 1) * dt)
        mean = obs[-1] + v * (steps * dt)[:, None]
        rng = np.random.Generator(
            np.random.PCG64(np.random.SeedSequence(cfg.seed, spawn_key=(traj.ped_id,)))
        )
        noise = rng.standard_normal((cfg.horizon, cfg.J, 2)) * (cfg.gamma * steps)[:, None, None]
        future = traj.start_timestep + cfg.observe_len + np.arange(cfg.horizon)
        ped_ids.append(traj.ped_id)
        frames.append(origin + future * dataset.frame_stride)
        samples.append(mean[:, None, :] + noise)
        truth.append(traj.positions[cfg.observe_len:need])
    return PredictionSet(
        ped_ids=np.array(ped_ids),
        frames=np.array(frames),
        samples=np.array(samples),
        ground_truth=np.array(truth),
        excluded=len(tracks) - len(eligible),
    )
