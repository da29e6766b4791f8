"""Crowd-size and walking-speed statistics of a small hand-made scene.

Two pedestrians: one walks three frames, the other four, overlapping on two.
"""

from pedsynth import compute_statistics, parse_dataset

TEXT = """\
0 1 0.0 0.0
10 1 0.4 0.0
20 1 0.4 0.3
10 2 1.0 1.0
20 2 1.0 1.8
30 2 1.6 1.8
40 2 1.6 1.8
"""

data = parse_dataset(TEXT, dt=0.4)
stats = compute_statistics(data)

# frames 0..40 hold 1, 2, 2, 1, 1 pedestrians
print(f"pedestrians per frame: mean {stats.mu_p:.3f}, sd {stats.sigma_p:.3f}")
for ped, speeds in stats.per_step_speeds.items():
    print(f"ped {ped}: step speeds {speeds.round(3)} m/s, mean {stats.mean_speeds[ped]:.3f}")
print(f"pooled within-pedestrian speed sd: {stats.sigma_s:.3f} m/s")
