"""Displacement metrics for probabilistic trajectory predictions.

Every metric works on the (pedestrian, timestep, sample) grid of Euclidean
distances between predicted samples and the ground-truth position. The
expectation over the predictive distribution is the plain sample mean over
the ``J`` samples.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass(eq=False)
class PredictionSet:
    """``J`` sampled positions per pedestrian per future timestep.

    Attributes:
        ped_ids: (N_p,) pedestrian ids.
        frames: (N_p, T) annotation frame id of each predicted timestep.
        samples: (N_p, T, J, 2) predicted positions in meters.
        ground_truth: (N_p, T, 2) true positions, or None until attached.
        excluded: pedestrians left out because their horizon or ground truth
            did not cover the full (N_p, T) grid.
    """

    ped_ids: np.ndarray
    frames: np.ndarray
    samples: np.ndarray
    ground_truth: np.ndarray | None = None
    excluded: int = field(default=0)

    def __post_init__(self):
        self.ped_ids = np.asarray(self.ped_ids, dtype=np.int64).reshape(-1)
        self.samples = np.asarray(self.samples, dtype=float)
        if self.samples.ndim != 4 or self.samples.shape[-1] != 2:
            raise ValueError(f"samples must have shape (N_p, T, J, 2), got {self.samples.shape}")
        n, T = self.samples.shape[:2]
        self.frames = np.asarray(self.frames, dtype=np.int64).reshape(n, T)
        if len(self.ped_ids) != n:
            raise ValueError("ped_ids and samples disagree on the number of pedestrians")
        if self.ground_truth is not None:
            self.ground_truth = np.asarray(self.ground_truth, dtype=float)
            if self.ground_truth.shape != (n, T, 2):
                raise ValueError(
                    f"ground_truth must have shape {(n, T, 2)}, got {self.ground_truth.shape}"
                )

    @property
    def num_peds(self) -> int:
        return self.samples.shape[0]

    @property
    def horizon(self) -> int:
        return self.samples.shape[1]

    @property
    def J(self) -> int:
        return self.samples.shape[2]

    @property
    def shape(self) -> tuple[int, int, int]:
        return self.samples.shape[:3]

    def with_ground_truth(self, dataset) -> PredictionSet:
        """Attach true positions looked up by (frame_id, ped_id) in ``dataset``.

        Pedestrians with any predicted frame missing from ``dataset`` are
        dropped and added to ``excluded``.
        """
        lookup = {
            (f, p): i
            for i, (f, p) in enumerate(zip(dataset.frames.tolist(), dataset.ped_ids.tolist()))
        }
        keep, gt = [], []
        for i, ped in enumerate(self.ped_ids.tolist()):
            rows = [lookup.get((f, ped)) for f in self.frames[i].tolist()]
            if None in rows:
                continue
            keep.append(i)
            gt.append(dataset.positions[rows])
        keep = np.array(keep, dtype=np.int64)
        T = self.horizon
        return PredictionSet(
            ped_ids=self.ped_ids[keep],
            frames=self.frames[keep],
            samples=self.samples[keep],
            ground_truth=np.array(gt).reshape(len(keep), T, 2),
            excluded=self.excluded + self.num_peds - len(keep),
        )


@dataclass
class MetricsReport:
    ade: float
    mde: float
    fde: float
    quantile_curve: np.ndarray
    num_peds: int
    horizon: int
    J: int
    excluded: int = 0


def distances(preds: PredictionSet) -> np.ndarray:
    """(N_p, T, J) distances from each sample to the ground truth."""
    if preds.ground_truth is None:
        raise ValueError("prediction set has no ground truth attached")
    if preds.samples.size == 0:
        raise ValueError("prediction set is empty")
    diff = preds.samples - preds.ground_truth[:, :, None, :]
    return np.hypot(diff[..., 0], diff[..., 1])


def ade(preds: PredictionSet) -> float:
    """Average displacement error: mean over pedestrians, timesteps and samples."""
    return float(distances(preds).mean(axis=2).mean())


def mde(preds: PredictionSet) -> float:
    """Minimum displacement error: closest sample, averaged over pedestrians and timesteps."""
    return float(distances(preds).min(axis=2).mean())


def fde(preds: PredictionSet) -> float:
    """Final displacement error: ADE restricted to the last predicted timestep."""
    return float(distances(preds)[:, -1, :].mean(axis=1).mean())


def quantile_curve(preds: PredictionSet) -> np.ndarray:
    """Mean of the q-th smallest sample distance over all (pedestrian, timestep) cells.

    Returns a nondecreasing array of length ``J``. Entry 0 equals the MDE and
    the mean of the curve equals the ADE.
    """
    d = np.sort(distances(preds), axis=2)
    return d.reshape(-1, preds.J).mean(axis=0)


def evaluate(preds: PredictionSet) -> MetricsReport:
    d = distances(preds)
    ds = np.sort(d, axis=2)
    return MetricsReport(
        ade=float(d.mean(axis=2).mean()),
        mde=float(ds[:, :, 0].mean()),
        fde=float(d[:, -1, :].mean(axis=1).mean()),
        quantile_curve=ds.reshape(-1, preds.J).mean(axis=0),
        num_peds=preds.num_peds,
        horizon=preds.horizon,
        J=preds.J,
        excluded=preds.excluded,
    )
