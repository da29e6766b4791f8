"""Path perturbations and piecewise-linear path following."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from pedsynth.io import Trajectory


class DegeneratePathError(ValueError):
    """All waypoints coincide, so the path has zero length."""


@dataclass(frozen=True)
class Perturbation:
    """A drawn perturbation: shift, then optional reversal, then drop trailing waypoints."""

    translation: tuple[float, float] = (0.0, 0.0)
    reversed: bool = False
    n_truncated: int = 0

    def apply(self, positions: np.ndarray) -> np.ndarray:
        pos = translate(positions, self.translation)
        if self.reversed:
            pos = reverse(pos)
        return truncate(pos, self.n_truncated)


def translate(positions: np.ndarray, shift) -> np.ndarray:
    return np.asarray(positions, dtype=float) + np.asarray(shift, dtype=float)


def reverse(positions: np.ndarray) -> np.ndarray:
    return np.asarray(positions)[::-1].copy()


def truncate(positions: np.ndarray, m: int) -> np.ndarray:
    """Drop the last ``m`` waypoints; at least two always remain."""
    positions = np.asarray(positions)
    if m < 0 or len(positions) - m < 2:
        raise ValueError(f"cannot drop {m} of {len(positions)} waypoints and keep 2")
    return positions[: len(positions) - m].copy()


def max_truncation(n_waypoints: int, max_fraction: float) -> int:
    return int(math.floor(max_fraction * (n_waypoints - 2)))


def draw_perturbation(
    n_waypoints: int,
    rng: np.random.Generator,
    radius: float = 2.0,
    p_reverse: float = 0.5,
    trunc_max_fraction: float = 0.5,
) -> Perturbation:
    """Draw a perturbation for a path of ``n_waypoints`` points.

    Consumes exactly three draws from ``rng`` in a fixed order: a 2-vector
    uniform on ``[-radius, radius]``, one uniform for the reversal coin, one
    integer for the truncation count.
    """
    if n_waypoints < 2:
        raise ValueError("a path needs at least 2 waypoints")
    shift = rng.uniform(-radius, radius, size=2)
    flip = bool(rng.random() < p_reverse)
    m = int(rng.integers(0, max_truncation(n_waypoints, trunc_max_fraction) + 1))
    return Perturbation((float(shift[0]), float(shift[1])), flip, m)


def perturb(path: Trajectory, cfg, rng: np.random.Generator) -> Trajectory:
    """Translate, maybe reverse, and truncate ``path`` using the radius and
    probabilities in ``cfg`` (a :class:`~pedsynth.sampler.SamplerConfig`)."""
    if len(path) < 2:
        raise ValueError("a path needs at least 2 waypoints")
    p = draw_perturbation(len(path), rng, cfg.r, cfg.p_r, cfg.trunc_max_fraction)
    return Trajectory(path.ped_id, path.start_timestep, p.apply(path.positions))


class PathSpline:
    """Piecewise-linear path parameterized by distance travelled along it.

    ``g(0)`` is the first waypoint and ``g(length)`` the last. Zero-length
    segments are dropped. Distances past either end are clamped to the
    endpoints.
    """

    def __init__(self, waypoints):
        pts = np.asarray(waypoints, dtype=float).reshape(-1, 2)
        if len(pts) < 2:
            raise ValueError("a path needs at least 2 waypoints")
        seg = np.diff(pts, axis=0)
        seg_len = np.hypot(seg[:, 0], seg[:, 1])
        moving = seg_len > 0
        self.knots = pts[np.concatenate(([True], moving))]
        self.cumlen = np.concatenate(([0.0], np.cumsum(seg_len[moving])))
        if len(self.knots) < 2:
            raise DegeneratePathError("all waypoints coincide")
        self.length = float(self.cumlen[-1])

    def __call__(self, d):
        d = np.asarray(d, dtype=float)
        x = np.interp(d, self.cumlen, self.knots[:, 0])
        y = np.interp(d, self.cumlen, self.knots[:, 1])
        return np.stack([x, y], axis=-1)

    def walk(self, step: float, n: int) -> tuple[np.ndarray, int]:
        """Follow the path in ``n`` hops of straight-line length ``step``.

        Starting from ``g(0)``, each hop lands on the first point further
        along the path whose Euclidean distance from the current point is
        ``step``. Once no such point remains, the remaining positions hold
        the final waypoint.

        Returns:
            (n, 2) positions and the number of full-length hops taken.
        """
        out = np.empty((n, 2))
        knots = self.knots.tolist()
        if step == 0:
            out[:] = knots[0]
            return out, n
        hh = step * step
        px, py = knots[0]
        seg, u = 0, 0.0
        last = len(knots) - 1
        for hop in range(n):
            while seg < last:
                ax, ay = knots[seg]
                bx, by = knots[seg + 1]
                ux, uy = bx - ax, by - ay
                wx, wy = ax - px, ay - py
                A = ux * ux + uy * uy
                B = wx * ux + wy * uy
                C = wx * wx + wy * wy - hh
                root = math.sqrt(max(B * B - A * C, 0.0))
                # larger root of A u^2 + 2 B u + C, written to avoid cancellation
                r = (root - B) / A if B <= 0 else -C / (B + root)
                if u <= r <= 1.0:
                    px, py = ax + r * ux, ay + r * uy
                    u = r
                    break
                seg, u = seg + 1, 0.0
            else:
                out[hop:] = knots[-1]
                return out, hop
            out[hop] = px, py
        return out, n


def fit_path(path: Trajectory | np.ndarray) -> PathSpline:
    pos = path.positions if isinstance(path, Trajectory) else path
    return PathSpline(pos)
