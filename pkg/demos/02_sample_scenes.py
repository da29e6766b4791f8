"""Draw synthetic scenes from the statistics of a set of straight walkers.

Each synthetic pedestrian borrows a real path, shifts it, may reverse and
shorten it, then walks it at a sampled constant speed.
"""

import numpy as np

from pedsynth import SamplerConfig, SceneDataset, Trajectory, compute_statistics, generate_dataset, generate_scenes

rng = np.random.default_rng(0)
tracks = []
for k in range(8):
    heading = rng.uniform(0, 2 * np.pi)
    speed = rng.uniform(0.8, 1.6)
    steps = np.arange(30)[:, None] * 0.4 * speed * np.array([np.cos(heading), np.sin(heading)])
    tracks.append(Trajectory(k + 1, int(rng.integers(0, 20)), steps + rng.normal(0, 0.05, steps.shape)))
real = SceneDataset.from_trajectories(tracks)
stats = compute_statistics(real)
print(f"real: {stats.K} pedestrians, mu_p={stats.mu_p:.2f}, sigma_s={stats.sigma_s:.3f}")

cfg = SamplerConfig(N=20, M=5, seed=7)
for scene in generate_scenes(stats, real.trajectories(), cfg):
    hops = [np.linalg.norm(np.diff(t.positions, axis=0), axis=1) / cfg.dt for t in scene.trajectories]
    speeds = ", ".join(f"{h[0]:.2f}" for h in hops)
    print(f"scene {scene.index}: n_p={scene.n_p}, speeds [{speeds}] m/s")

synth = generate_dataset(stats, real.trajectories(), SamplerConfig(N=20, M=500, seed=7))
print(f"500 scenes of 20 steps: {synth.num_frames} frames, {synth.num_pedestrians} pedestrians")
