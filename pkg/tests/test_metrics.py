import math

import numpy as np
import pytest

from pedsynth.io import SceneDataset, Trajectory
from pedsynth.metrics import PredictionSet, ade, evaluate, fde, mde, quantile_curve


def make_set(samples, truth):
    samples = np.asarray(samples, float)
    n, T = samples.shape[:2]
    return PredictionSet(np.arange(n), np.tile(np.arange(T), (n, 1)), samples, np.asarray(truth, float))


def random_set(rng, n=None, T=8, J=100):
    n = n or int(rng.integers(1, 11))
    truth = rng.normal(0, 5, size=(n, T, 2))
    samples = truth[:, :, None, :] + rng.normal(0, rng.uniform(0.1, 2), size=(n, T, J, 2))
    return make_set(samples, truth)


def naive(p):
    """Triple loops over pedestrians, timesteps and samples."""
    n, T, J = p.shape
    dist = [[[math.dist(p.samples[i, t, j], p.ground_truth[i, t]) for j in range(J)] for t in range(T)] for i in range(n)]
    ade_ = sum(sum(d) / J for row in dist for d in row) / (n * T)
    mde_ = sum(min(d) for row in dist for d in row) / (n * T)
    fde_ = sum(sum(row[-1]) / J for row in dist) / n
    curve = [sum(sorted(d)[q] for row in dist for d in row) / (n * T) for q in range(J)]
    return ade_, mde_, fde_, curve


def on_line(distances):
    """One pedestrian, one timestep, samples at the given distances along x."""
    return make_set([[[[d, 0.0] for d in distances]]], [[[0.0, 0.0]]])


def test_two_samples():
    p = on_line([1.0, 3.0])
    assert ade(p) == 2.0 and mde(p) == 1.0 and fde(p) == 2.0


def test_perfect_predictions():
    truth = np.random.default_rng(0).normal(size=(3, 4, 2))
    p = make_set(np.repeat(truth[:, :, None, :], 5, axis=2), truth)
    assert ade(p) == mde(p) == fde(p) == 0.0


def test_single_sample_mde_equals_ade():
    p = random_set(np.random.default_rng(1), J=1)
    assert mde(p) == ade(p)


def test_single_step_fde_equals_ade():
    p = random_set(np.random.default_rng(2), T=1)
    assert fde(p) == pytest.approx(ade(p), rel=1e-15)


def test_fde_two_pedestrians():
    samples = np.zeros((2, 3, 2, 2))
    samples[0, -1] = [[1, 0], [1, 0]]
    samples[1, -1] = [[0, 1], [0, 3]]
    p = make_set(samples, np.zeros((2, 3, 2)))
    assert fde(p) == 1.5


def test_quantile_curve_sorts():
    assert quantile_curve(on_line([3.0, 1.0, 2.0])).tolist() == [1.0, 2.0, 3.0]


def test_identical_predictions_constant_curve():
    p = make_set(np.full((2, 3, 6, 2), 1.0), np.zeros((2, 3, 2)))
    curve = quantile_curve(p)
    assert np.all(curve == curve[0])


@pytest.mark.parametrize("seed", range(10))
def test_against_naive_oracle(seed):
    p = random_set(np.random.default_rng(100 + seed))
    a, m, f, c = naive(p)
    assert ade(p) == pytest.approx(a, rel=1e-12)
    assert mde(p) == pytest.approx(m, rel=1e-12)
    assert fde(p) == pytest.approx(f, rel=1e-12)
    np.testing.assert_allclose(quantile_curve(p), c, rtol=1e-12)
    report = evaluate(p)
    assert (report.ade, report.mde, report.fde) == (ade(p), mde(p), fde(p))
    assert report.quantile_curve[0] == pytest.approx(report.mde, rel=1e-12)
    assert report.quantile_curve.mean() == pytest.approx(report.ade, rel=1e-12)


def test_invariances():
    rng = np.random.default_rng(7)
    for _ in range(20):
        p = random_set(rng, J=20)
        base = np.array([ade(p), mde(p), fde(p)])
        curve = quantile_curve(p)
        assert base[1] <= base[0] <= curve.max()
        assert np.all(np.diff(curve) >= 0)

        theta = rng.uniform(0, 2 * np.pi)
        R = np.array([[np.cos(theta), -np.sin(theta)], [np.sin(theta), np.cos(theta)]])
        shift = rng.normal(0, 10, 2)
        moved = make_set(p.samples @ R.T + shift, p.ground_truth @ R.T + shift)
        np.testing.assert_allclose([ade(moved), mde(moved), fde(moved)], base, rtol=1e-10)

        scaled = make_set(p.samples * 3.0, p.ground_truth * 3.0)
        np.testing.assert_allclose([ade(scaled), mde(scaled), fde(scaled)], 3 * base, rtol=1e-12)

        perm_i = rng.permutation(p.num_peds)
        perm_j = rng.permutation(p.J)
        shuffled = make_set(p.samples[perm_i][:, :, perm_j], p.ground_truth[perm_i])
        np.testing.assert_allclose([ade(shuffled), mde(shuffled), fde(shuffled)], base, rtol=1e-12)
        np.testing.assert_allclose(quantile_curve(shuffled), curve, rtol=1e-12)


def test_missing_ground_truth_or_empty():
    p = PredictionSet([1], [[0]], np.zeros((1, 1, 2, 2)))
    with pytest.raises(ValueError, match="ground truth"):
        ade(p)
    empty = PredictionSet(np.zeros(0), np.zeros((0, 3)), np.zeros((0, 3, 4, 2)), np.zeros((0, 3, 2)))
    with pytest.raises(ValueError, match="empty"):
        evaluate(empty)


def test_shape_validation():
    with pytest.raises(ValueError):
        PredictionSet([1], [[0]], np.zeros((1, 1, 2)))
    with pytest.raises(ValueError):
        PredictionSet([1], [[0]], np.zeros((1, 1, 2, 2)), ground_truth=np.zeros((1, 2, 2)))


def test_attach_ground_truth_excludes_uncovered():
    truth = SceneDataset.from_trajectories(
        [Trajectory(1, 0, [[0, 0], [1, 0], [2, 0]]), Trajectory(2, 0, [[5, 5], [6, 6]])]
    )
    preds = PredictionSet([1, 2], [[10, 20], [10, 20]], np.zeros((2, 2, 3, 2)))
    scored = preds.with_ground_truth(truth)
    assert scored.ped_ids.tolist() == [1]
    assert scored.excluded == 1
    np.testing.assert_array_equal(scored.ground_truth, [[[1, 0], [2, 0]]])
    assert evaluate(scored).ade == 1.5
