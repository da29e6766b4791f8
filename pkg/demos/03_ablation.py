"""Switching off speed or crowd-size variability.

With the speed variance zeroed every pedestrian walks exactly at the mean
speed of the real pedestrian it was drawn from; with the crowd-size variance
zeroed every scene holds the rounded mean crowd size.
"""

import numpy as np

from pedsynth import SamplerConfig, SceneDataset, Trajectory, compute_statistics, generate_scenes

rng = np.random.default_rng(1)
tracks = [
    Trajectory(k + 1, int(rng.integers(0, 10)), np.cumsum(rng.normal(0.4, 0.1, (25, 2)), axis=0))
    for k in range(10)
]
real = SceneDataset.from_trajectories(tracks)
stats = compute_statistics(real)
paths = real.trajectories()

for label, flags in [
    ("full model", {}),
    ("zero speed sd", {"zero_sigma_s": True}),
    ("zero crowd sd", {"zero_sigma_p": True}),
]:
    scenes = generate_scenes(stats, paths, SamplerConfig(M=300, seed=3, **flags))
    sizes = np.array([s.n_p for s in scenes])
    gaps = np.array([p.speed - p.mean_speed for s in scenes for p in s.provenance])
    print(f"{label:14}: n_p mean {sizes.mean():.2f} sd {sizes.std():.2f}; speed minus mean speed sd {gaps.std():.3f}")
print(f"mu_p = {stats.mu_p:.2f}")
