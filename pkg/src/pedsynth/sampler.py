"""Stochastic sampling of synthetic pedestrian scenes.

One scene draws a crowd size from a zero-truncated normal fitted to the
real per-frame counts, then for each synthetic pedestrian draws a mean
speed from the real pool, a speed around it, and a real path which is
perturbed and followed at that speed for ``N + 1`` timesteps.

Randomness comes from numpy's PCG64 bit generator. Scene ``j`` of a run
seeded with ``seed`` uses ``SeedSequence(seed, spawn_key=(j,))``, which is
the ``j``-th child of ``SeedSequence(seed).spawn``, so scenes can be
generated in any order or in parallel with identical results.
"""

from __future__ import annotations

import concurrent.futures
import csv
import io
import math
from dataclasses import asdict, dataclass, field
from functools import partial
from typing import Sequence

import numpy as np

from pedsynth.io import DEFAULT_FRAME_STRIDE, SceneDataset, Trajectory
from pedsynth.paths import DegeneratePathError, PathSpline, draw_perturbation
from pedsynth.statistics import SceneStatistics

EXHAUSTION_POLICIES = ("clamp", "drop_remaining")
STEPPING_MODES = ("chord", "arc")
MAX_REJECTIONS = 100_000
MAX_PATH_REDRAWS = 100


class RejectionLimitError(RuntimeError):
    """Rejection sampling gave up; the truncated tail holds almost no mass."""


@dataclass(frozen=True)
class SamplerConfig:
    """Parameters of a sampling run.

    ``N`` is the number of steps per synthetic track (tracks hold ``N + 1``
    positions) and ``M`` the number of scenes. ``r`` bounds the uniform
    translation on each axis, ``p_r`` is the reversal probability, and up to
    ``floor(trunc_max_fraction * (n - 2))`` trailing waypoints of an
    ``n``-waypoint path are removed.

    ``stepping`` picks how a speed becomes positions along a path: ``"chord"``
    places consecutive positions exactly ``speed * dt`` apart in straight
    line distance; ``"arc"`` places position ``l`` at arc length
    ``speed * dt * l``. Both agree on straight segments.
    """

    N: int = 20
    M: int = 500
    dt: float = 0.4
    r: float = 2.0
    p_r: float = 0.5
    trunc_max_fraction: float = 0.5
    seed: int = 0
    zero_sigma_s: bool = False
    zero_sigma_p: bool = False
    exhaustion_policy: str = "clamp"
    stepping: str = "chord"

    def __post_init__(self):
        if self.N < 1 or self.M < 1:
            raise ValueError("N and M must be at least 1")
        if not self.dt > 0:
            raise ValueError("dt must be positive")
        if not self.r >= 0:
            raise ValueError("r must be non-negative")
        if not 0 <= self.p_r <= 1:
            raise ValueError("p_r must lie in [0, 1]")
        if not 0 <= self.trunc_max_fraction < 1:
            raise ValueError("trunc_max_fraction must lie in [0, 1)")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")
        if self.exhaustion_policy not in EXHAUSTION_POLICIES:
            raise ValueError(f"exhaustion_policy must be one of {EXHAUSTION_POLICIES}")
        if self.stepping not in STEPPING_MODES:
            raise ValueError(f"stepping must be one of {STEPPING_MODES}")


@dataclass
class Provenance:
    """How one synthetic pedestrian was made."""

    source_ped_id: int
    translation: tuple[float, float]
    reversed: bool
    n_truncated: int
    mean_speed: float
    speed: float
    path_length: float
    n_clamped: int
    redraws: int = 0


@dataclass
class SyntheticScene:
    index: int
    trajectories: list[Trajectory]
    provenance: list[Provenance] = field(default_factory=list)

    @property
    def n_p(self) -> int:
        return len(self.trajectories)

    @property
    def num_frames(self) -> int:
        return max(len(t) for t in self.trajectories)


def scene_rng(seed: int, index: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(index,))))


def sample_truncated_normal(
    mu: float,
    var: float,
    rng: np.random.Generator,
    size: int | None = None,
    max_tries: int = MAX_REJECTIONS,
):
    """Draw from ``N(mu, var)`` conditioned on being non-negative.

    Uses plain rejection. With ``var == 0`` returns ``mu`` without touching
    ``rng``. With ``size`` set, ``mu`` may be an array broadcast to ``size``
    and an array is returned. Raises :class:`RejectionLimitError` when
    ``max_tries`` rounds of rejection fail, which happens once ``mu`` sits
    several standard deviations below zero.
    """
    if var < 0:
        raise ValueError(f"variance must be non-negative, got {var}")
    if var == 0:
        if np.any(np.asarray(mu) < 0):
            raise ValueError(f"N({mu}, 0) has no mass on [0, inf)")
        return float(mu) if size is None else np.broadcast_to(np.asarray(mu, dtype=float), size).copy()
    sd = math.sqrt(var)
    if size is None:
        for _ in range(max_tries):
            x = rng.normal(mu, sd)
            if x >= 0:
                return float(x)
        raise RejectionLimitError(
            f"no non-negative draw from N({mu}, {var}) in {max_tries} tries; the tail is degenerate"
        )
    mu = np.broadcast_to(np.asarray(mu, dtype=float), size)
    out = rng.normal(mu, sd)
    bad = np.flatnonzero(out < 0)
    for _ in range(max_tries):
        if not len(bad):
            return out
        out[bad] = rng.normal(mu[bad], sd)
        bad = bad[out[bad] < 0]
    raise RejectionLimitError(
        f"no non-negative draw from N({mu}, {var}) in {max_tries} tries; the tail is degenerate"
    )


def round_half_up(x):
    return np.floor(np.asarray(x) + 0.5)


def sample_crowd_size(
    stats: SceneStatistics, cfg: SamplerConfig, rng: np.random.Generator, size: int | None = None
):
    """Number of pedestrians in one scene: a rounded truncated-normal draw, at least 1."""
    if not stats.mu_p > 0:
        raise ValueError("mu_p must be positive")
    var = 0.0 if cfg.zero_sigma_p else stats.var_p
    n = np.maximum(round_half_up(sample_truncated_normal(stats.mu_p, var, rng, size)), 1)
    return int(n) if size is None else n.astype(np.int64)


def sample_speed(
    stats: SceneStatistics, cfg: SamplerConfig, rng: np.random.Generator, size: int | None = None
):
    """Return ``(mean_speed, speed)``: a uniform pick from the real mean speeds
    and a truncated-normal speed around it."""
    pool = stats.speed_pool
    if not len(pool):
        raise ValueError("speed pool is empty")
    var = 0.0 if cfg.zero_sigma_s else stats.var_s
    if size is None:
        s_bar = float(pool[rng.integers(len(pool))])
        return s_bar, sample_truncated_normal(s_bar, var, rng)
    s_bar = pool[rng.integers(len(pool), size=size)]
    return s_bar, sample_truncated_normal(s_bar, var, rng, size=size)


def _follow(spline: PathSpline, speed: float, cfg: SamplerConfig) -> tuple[np.ndarray, int]:
    n = cfg.N + 1
    step = speed * cfg.dt
    if cfg.stepping == "chord":
        pos, reached = spline.walk(step, n)
    else:
        d = step * np.arange(1, n + 1)
        pos = spline(d)
        reached = int(np.count_nonzero(d <= spline.length))
    if cfg.exhaustion_policy == "drop_remaining" and reached < n:
        pos = pos[: max(reached, 1)]
    return pos, reached


def sample_scene(
    stats: SceneStatistics,
    paths: Sequence[Trajectory],
    cfg: SamplerConfig,
    rng: np.random.Generator,
    index: int = 0,
) -> SyntheticScene:
    """Sample one synthetic scene.

    Draw order from ``rng``: crowd size; then per pedestrian the mean speed
    index, the speed, the path index and the perturbation (see
    :func:`~pedsynth.paths.draw_perturbation`). A path that collapses to a
    point is redrawn together with a fresh perturbation.
    """
    if not len(paths):
        raise ValueError("path pool is empty")
    n_p = sample_crowd_size(stats, cfg, rng)
    trajectories, provenance = [], []
    for i in range(n_p):
        s_bar, s = sample_speed(stats, cfg, rng)
        for redraws in range(MAX_PATH_REDRAWS):
            source = paths[int(rng.integers(len(paths)))]
            pert = draw_perturbation(len(source), rng, cfg.r, cfg.p_r, cfg.trunc_max_fraction)
            try:
                spline = PathSpline(pert.apply(source.positions))
                break
            except DegeneratePathError:
                continue
        else:
            raise DegeneratePathError(
                f"scene {index}: {MAX_PATH_REDRAWS} consecutive path draws had zero length"
            )
        pos, reached = _follow(spline, s, cfg)
        trajectories.append(Trajectory(ped_id=i, start_timestep=0, positions=pos))
        provenance.append(
            Provenance(
                source_ped_id=source.ped_id,
                translation=pert.translation,
                reversed=pert.reversed,
                n_truncated=pert.n_truncated,
                mean_speed=s_bar,
                speed=s,
                path_length=spline.length,
                n_clamped=cfg.N + 1 - reached,
                redraws=redraws,
            )
        )
    return SyntheticScene(index, trajectories, provenance)


def _scene_job(stats, paths, cfg, index):
    try:
        return sample_scene(stats, paths, cfg, scene_rng(cfg.seed, index), index)
    except (ValueError, RuntimeError) as exc:
        raise type(exc)(f"scene {index}: {exc}") from exc


def _run_scenes(stats, paths, cfg, indices, workers):
    job = partial(_scene_job, stats, list(paths), cfg)
    if workers <= 1 or len(indices) < 2:
        return [job(j) for j in indices]
    chunk = max(1, len(indices) // (4 * workers))
    with concurrent.futures.ProcessPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(job, indices, chunksize=chunk))


def generate_scenes(
    stats: SceneStatistics,
    paths: Sequence[Trajectory],
    cfg: SamplerConfig,
    target_frames: int | None = None,
    workers: int = 1,
) -> list[SyntheticScene]:
    """Generate ``cfg.M`` scenes, or with ``target_frames`` as many as it takes
    for the total frame count to reach it (``cfg.M`` is then ignored).

    Scene ``j`` depends only on ``(cfg.seed, j)``; ``workers > 1`` spreads the
    scenes over processes without changing the result.
    """
    if target_frames is None:
        return _run_scenes(stats, paths, cfg, list(range(cfg.M)), workers)
    scenes, total = [], 0
    while total < target_frames:
        batch = max(1, -(-(target_frames - total) // (cfg.N + 1)))
        start = len(scenes)
        for scene in _run_scenes(stats, paths, cfg, list(range(start, start + batch)), workers):
            if total >= target_frames:
                break
            scenes.append(scene)
            total += scene.num_frames
    return scenes


def scenes_to_dataset(
    scenes: Sequence[SyntheticScene],
    cfg: SamplerConfig,
    frame_stride: int = DEFAULT_FRAME_STRIDE,
) -> SceneDataset:
    """Lay scenes end to end in time; scene ``j`` owns timesteps
    ``j*(N+1) .. j*(N+1)+N`` and pedestrians are renumbered from 1."""
    tracks, next_id = [], 1
    for j, scene in enumerate(scenes):
        for traj in scene.trajectories:
            tracks.append(Trajectory(next_id, j * (cfg.N + 1) + traj.start_timestep, traj.positions))
            next_id += 1
    return SceneDataset.from_trajectories(tracks, frame_stride=frame_stride, dt=cfg.dt)


def generate_dataset(
    stats: SceneStatistics,
    paths: Sequence[Trajectory],
    cfg: SamplerConfig,
    target_frames: int | None = None,
    workers: int = 1,
    frame_stride: int = DEFAULT_FRAME_STRIDE,
) -> SceneDataset:
    scenes = generate_scenes(stats, paths, cfg, target_frames=target_frames, workers=workers)
    return scenes_to_dataset(scenes, cfg, frame_stride)


PROVENANCE_COLUMNS = (
    "scene", "ped_id", "source_ped_id", "dx", "dy", "reversed", "n_truncated",
    "mean_speed", "speed", "path_length", "n_clamped", "redraws",
)


def format_provenance(scenes: Sequence[SyntheticScene]) -> str:
    """CSV with one row per synthetic pedestrian, ped ids numbered as in
    :func:`scenes_to_dataset`."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(PROVENANCE_COLUMNS)
    ped_id = 1
    for j, scene in enumerate(scenes):
        for prov in scene.provenance:
            d = asdict(prov)
            dx, dy = d.pop("translation")
            writer.writerow([
                j, ped_id, d["source_ped_id"], repr(dx), repr(dy), int(d["reversed"]),
                d["n_truncated"], repr(d["mean_speed"]), repr(d["speed"]),
                repr(d["path_length"]), d["n_clamped"], d["redraws"],
            ])
            ped_id += 1
    return buf.getvalue()
