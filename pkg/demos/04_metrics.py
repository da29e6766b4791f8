"""Score a probabilistic constant-velocity baseline.

ADE averages distances over every sample; MDE takes the best sample per
cell; FDE averages the last step. The quantile curve sorts samples per cell,
so its first entry equals MDE and its mean equals ADE.
"""

import numpy as np

from pedsynth import PredictorConfig, SceneDataset, Trajectory, evaluate, predict

rng = np.random.default_rng(2)
tracks = []
for k in range(20):
    v = rng.normal(0, 1, 2)
    turn = rng.normal(0, 0.05)
    heading = np.cumsum(np.full(16, turn))
    rot = np.stack([np.cos(heading), np.sin(heading)], axis=1) * np.linalg.norm(v)
    tracks.append(Trajectory(k + 1, 0, np.cumsum(rot * 0.4, axis=0)))
truth = SceneDataset.from_trajectories(tracks)

for gamma in (0.0, 0.1, 0.3):
    report = evaluate(predict(truth, PredictorConfig(gamma=gamma, J=100, seed=0)))
    curve = report.quantile_curve
    print(
        f"gamma={gamma}: ADE {report.ade:.3f}  MDE {report.mde:.3f}  FDE {report.fde:.3f}  "
        f"curve[0] {curve[0]:.3f}  curve mean {curve.mean():.3f}  curve[-1] {curve[-1]:.3f}"
    )
