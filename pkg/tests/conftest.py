import numpy as np
import pytest

from pedsynth.io import SceneDataset, Trajectory, parse_dataset

# Two pedestrians laid out like the speed illustration: ped 1 seen for three
# timesteps, ped 2 for four, overlapping at frames 10 and 20.
FIG2_TEXT = """\
0\t1\t0.0\t0.0
10\t1\t0.4\t0.0
20\t1\t0.4\t0.3
10\t2\t1.0\t1.0
20\t2\t1.0\t1.8
30\t2\t1.6\t1.8
40\t2\t1.6\t1.8
"""


@pytest.fixture
def fig2_text():
    return FIG2_TEXT


@pytest.fixture
def fig2():
    return parse_dataset(FIG2_TEXT, dt=0.4)


def straight_walkers(n_peds=6, n_steps=40, dt=0.4, stride=10, seed=0):
    """Pedestrians walking straight lines at constant, distinct speeds."""
    rng = np.random.default_rng(seed)
    tracks = []
    for k in range(n_peds):
        speed = 0.8 + 0.1 * k
        heading = rng.uniform(0, 2 * np.pi)
        start = rng.uniform(-5, 5, size=2)
        t = np.arange(n_steps)[:, None]
        pos = start + t * speed * dt * np.array([np.cos(heading), np.sin(heading)])
        tracks.append(Trajectory(k + 1, int(rng.integers(0, 10)), pos))
    return SceneDataset.from_trajectories(tracks, frame_stride=stride, dt=dt)


def random_dataset(rng, max_peds=8, max_len=12):
    """A valid dataset with random ids, offsets, strides and coordinates."""
    stride = int(rng.integers(1, 13))
    n_peds = int(rng.integers(1, max_peds + 1))
    ids = rng.choice(1000, size=n_peds, replace=False)
    tracks = [
        Trajectory(
            int(pid),
            int(rng.integers(0, 20)),
            rng.normal(0, 10, size=(int(rng.integers(2, max_len + 1)), 2)),
        )
        for pid in ids
    ]
    return SceneDataset.from_trajectories(
        tracks, frame_stride=stride, dt=0.4, frame_origin=int(rng.integers(0, 50)) * stride
    )


ACCEPTANCE_RESULTS = []


def report_criterion(number, passed, detail):
    ACCEPTANCE_RESULTS.append((number, passed, detail))
    return passed


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number, passed, detail in sorted(ACCEPTANCE_RESULTS, key=lambda r: (r[0], r[2])):
        status = {True: "PASS", False: "FAIL", None: "NOT RUN"}[passed]
        terminalreporter.write_line(f"criterion {number:>2}: {status:7} {detail}")
