import math
from collections import defaultdict

import numpy as np
import pytest

from pedsynth.io import SceneDataset, Trajectory, parse_dataset
from pedsynth.statistics import (
    compute_statistics,
    frame_count_stats,
    pooled_speed_variance,
    step_speeds,
)

from conftest import random_dataset


def naive_statistics(data):
    """Loop-by-loop recomputation used as an independent check."""
    per_frame = defaultdict(int)
    for f in data.frames.tolist():
        per_frame[f] += 1
    counts = list(per_frame.values())
    mu = sum(counts) / len(counts)
    var = sum((c - mu) ** 2 for c in counts) / len(counts)
    tracks = defaultdict(list)
    for f, p, (x, y) in sorted(zip(data.frames.tolist(), data.ped_ids.tolist(), data.positions.tolist()),
                               key=lambda r: (r[1], r[0])):
        tracks[p].append((x, y))
    speeds = {
        p: [math.dist(a, b) / data.dt for a, b in zip(pts, pts[1:])] for p, pts in tracks.items()
    }
    ss = dof = 0
    for s in speeds.values():
        m = sum(s) / len(s)
        ss += sum((v - m) ** 2 for v in s)
        dof += len(s) - 1
    means = {p: sum(s) / len(s) for p, s in speeds.items()}
    return mu, var, means, ss / dof


@pytest.mark.parametrize(
    "positions, expected",
    [
        ([(0, 0), (0.4, 0), (0.8, 0)], [1.0, 1.0]),
        ([(0, 0), (0, 0)], [0.0]),
        ([(0, 0), (3, 4)], [12.5]),
    ],
)
def test_step_speeds(positions, expected):
    np.testing.assert_allclose(step_speeds(np.array(positions, float), 0.4), expected, rtol=1e-15)


def test_step_speeds_needs_two_positions():
    with pytest.raises(ValueError):
        step_speeds(np.zeros((1, 2)), 0.4)
    with pytest.raises(ValueError):
        step_speeds(np.zeros((2, 2)), 0.0)


def test_frame_counts_single_pedestrian():
    d = SceneDataset.from_trajectories([Trajectory(1, 0, np.zeros((3, 2)))])
    assert frame_count_stats(d) == (1.0, 0.0)


def test_frame_counts_full_overlap():
    d = SceneDataset.from_trajectories(
        [Trajectory(1, 0, np.zeros((4, 2))), Trajectory(2, 0, np.ones((4, 2)))]
    )
    assert frame_count_stats(d) == (2.0, 0.0)


def test_frame_counts_staggered():
    # ped A on frames 0,10,20 and ped B on 10,20,30 -> counts 1,2,2,1
    d = parse_dataset("0 1 0 0\n10 1 0 0\n20 1 0 0\n10 2 0 0\n20 2 0 0\n30 2 0 0\n")
    assert frame_count_stats(d) == (1.5, 0.25)


def test_frame_counts_empty():
    with pytest.raises(ValueError):
        frame_count_stats(SceneDataset.empty())


def test_pooled_variance_constant_speeds_is_zero():
    assert pooled_speed_variance({1: [1.3, 1.3, 1.3], 2: [0.7, 0.7]}) == 0.0


def test_pooled_variance_single_group():
    assert pooled_speed_variance({1: [1.0, 3.0]}) == 2.0


def test_pooled_variance_two_groups():
    # squared deviations 2 and 6 over 1 + 2 degrees of freedom
    assert pooled_speed_variance({1: [1, 3], 2: [2, 2, 5]}) == pytest.approx(8 / 3, rel=1e-15)


def test_pooled_variance_skips_single_samples():
    assert pooled_speed_variance({1: [1, 3], 2: [9.0]}) == 2.0
    with pytest.raises(ValueError):
        pooled_speed_variance({1: [1.0], 2: [2.0]})


def test_global_pooling_option():
    assert pooled_speed_variance({1: [1, 3], 2: [2, 2, 5]}, pooling="global") == pytest.approx(
        np.var([1, 3, 2, 2, 5], ddof=1)
    )
    with pytest.raises(ValueError):
        pooled_speed_variance({1: [1, 3]}, pooling="bogus")


def test_fig2_statistics(fig2):
    stats = compute_statistics(fig2)
    assert stats.K == 2
    # ped 1 steps: 0.4 m, 0.3 m; ped 2 steps: 0.8 m, 0.6 m, 0 m
    assert stats.mean_speeds[1] == pytest.approx(0.875, rel=1e-12)
    assert stats.mean_speeds[2] == pytest.approx(3.5 / 3, rel=1e-12)
    # within-ped squared deviations 1/32 and 13/6 over 3 degrees of freedom
    assert stats.var_s == pytest.approx(211 / 288, rel=1e-12)
    # counts over frames 0..40: 1, 2, 2, 1, 1
    assert stats.mu_p == pytest.approx(1.4, rel=1e-15)
    assert stats.var_p == pytest.approx(0.24, rel=1e-12)


def test_single_pedestrian_dataset():
    d = parse_dataset("0 4 0 0\n10 4 1 0\n20 4 3 0\n")
    stats = compute_statistics(d)
    assert stats.K == 1 and stats.var_p == 0.0 and stats.mu_p == 1.0


def test_matches_naive_loops():
    rng = np.random.default_rng(11)
    for _ in range(30):
        d = random_dataset(rng)
        if all(len(t) < 3 for t in d.trajectories()):
            continue
        stats = compute_statistics(d)
        mu, var, means, var_s = naive_statistics(d)
        assert stats.mu_p == pytest.approx(mu, rel=1e-12)
        assert stats.var_p == pytest.approx(var, rel=1e-12, abs=1e-15)
        assert stats.var_s == pytest.approx(var_s, rel=1e-12)
        for k, m in means.items():
            assert stats.mean_speeds[k] == pytest.approx(m, rel=1e-12)
            assert np.mean(stats.per_step_speeds[k]) == pytest.approx(stats.mean_speeds[k], rel=1e-12)
        assert stats.K == len(means) == d.num_pedestrians


def _stats_tuple(s):
    return s.mu_p, s.var_p, s.var_s, np.array([s.mean_speeds[k] for k in sorted(s.mean_speeds)])


def _transformed(d, shift=(0, 0), scale=1.0, frame_shift=0):
    return SceneDataset(d.frames + frame_shift, d.ped_ids, d.positions * scale + shift, d.frame_stride, d.dt)


def test_translation_time_shift_and_scaling():
    rng = np.random.default_rng(2)
    for _ in range(20):
        d = random_dataset(rng)
        if all(len(t) < 3 for t in d.trajectories()):
            continue
        mu, vp, vs, means = _stats_tuple(compute_statistics(d))
        mu2, vp2, vs2, means2 = _stats_tuple(compute_statistics(_transformed(d, shift=(13.5, -7.25))))
        assert (mu2, vp2) == (mu, vp)
        assert vs2 == pytest.approx(vs, rel=1e-9, abs=1e-12)
        np.testing.assert_allclose(means2, means, rtol=1e-9)
        assert _stats_tuple(compute_statistics(_transformed(d, frame_shift=d.frame_stride * 17)))[:3] == (mu, vp, vs)
        c = 2.5
        mu3, vp3, vs3, means3 = _stats_tuple(compute_statistics(_transformed(d, scale=c)))
        assert (mu3, vp3) == (mu, vp)
        assert vs3 == pytest.approx(c * c * vs, rel=1e-12)
        np.testing.assert_allclose(means3, c * means, rtol=1e-12)
