"""Reading and writing annotation files and prediction files.

Annotation files follow the preprocessed ETH/UCY world-coordinate layout,
one record per line::

    frame_id <TAB> ped_id <TAB> x <TAB> y

Prediction files add a sample index::

    frame_id <TAB> ped_id <TAB> sample_id <TAB> x <TAB> y

The parser accepts runs of tabs or spaces between fields. The writer always
emits single tabs, with integers in plain decimal and coordinates in the
canonical form produced by :func:`format_float`.
"""

from __future__ import annotations

import io
import logging
import math
import os
from dataclasses import dataclass, field
from typing import IO, Iterable, Union

import numpy as np

from pedsynth.metrics import PredictionSet

logger = logging.getLogger(__name__)

DEFAULT_FRAME_STRIDE = 10

Source = Union[str, bytes, IO[str], IO[bytes]]


class ParseError(ValueError):
    """A line could not be parsed. ``lineno`` is 1-based."""

    def __init__(self, message: str, lineno: int):
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno


class StructureError(ValueError):
    """The records parse but do not form a valid dataset."""


@dataclass(eq=False)
class Trajectory:
    """One pedestrian's positions at consecutive timesteps."""

    ped_id: int
    start_timestep: int
    positions: np.ndarray

    def __post_init__(self):
        self.positions = np.asarray(self.positions, dtype=float).reshape(-1, 2)

    def __len__(self) -> int:
        return len(self.positions)

    def __eq__(self, other):
        if not isinstance(other, Trajectory):
            return NotImplemented
        return (
            self.ped_id == other.ped_id
            and self.start_timestep == other.start_timestep
            and np.array_equal(self.positions, other.positions)
        )

    def __repr__(self):
        return (
            f"Trajectory(ped_id={self.ped_id}, start_timestep={self.start_timestep}, "
            f"n={len(self)})"
        )


@dataclass(eq=False)
class SceneDataset:
    """A set of annotation records, stored column-wise and sorted by (frame, ped).

    Attributes:
        frames: (n,) integer annotation frame ids.
        ped_ids: (n,) integer pedestrian ids.
        positions: (n, 2) world coordinates in meters.
        frame_stride: annotation frames between consecutive timesteps.
        dt: seconds per timestep.
        dropped_tracks: tracks discarded at parse time for having fewer
            than two records.
    """

    frames: np.ndarray
    ped_ids: np.ndarray
    positions: np.ndarray
    frame_stride: int = DEFAULT_FRAME_STRIDE
    dt: float = 0.4
    dropped_tracks: int = field(default=0, compare=False)

    def __post_init__(self):
        self.frames = np.asarray(self.frames, dtype=np.int64).reshape(-1)
        self.ped_ids = np.asarray(self.ped_ids, dtype=np.int64).reshape(-1)
        self.positions = np.asarray(self.positions, dtype=float).reshape(-1, 2)
        if not (len(self.frames) == len(self.ped_ids) == len(self.positions)):
            raise StructureError("frames, ped_ids and positions differ in length")
        if self.frame_stride < 1:
            raise StructureError(f"frame_stride must be positive, got {self.frame_stride}")
        if not self.dt > 0:
            raise StructureError(f"dt must be positive, got {self.dt}")
        order = np.lexsort((self.ped_ids, self.frames))
        self.frames = self.frames[order]
        self.ped_ids = self.ped_ids[order]
        self.positions = self.positions[order]
        _check_records(self.frames, self.ped_ids, self.positions, self.frame_stride)

    @classmethod
    def empty(cls, frame_stride: int = DEFAULT_FRAME_STRIDE, dt: float = 0.4) -> SceneDataset:
        return cls(np.empty(0), np.empty(0), np.empty((0, 2)), frame_stride, dt)

    @classmethod
    def from_trajectories(
        cls,
        trajectories: Iterable[Trajectory],
        frame_stride: int = DEFAULT_FRAME_STRIDE,
        dt: float = 0.4,
        frame_origin: int = 0,
    ) -> SceneDataset:
        """Build a dataset; timestep ``t`` maps to frame ``frame_origin + t * frame_stride``."""
        frames, peds, pos = [], [], []
        for traj in trajectories:
            n = len(traj)
            frames.append(frame_origin + (traj.start_timestep + np.arange(n)) * frame_stride)
            peds.append(np.full(n, traj.ped_id))
            pos.append(traj.positions)
        if not frames:
            return cls.empty(frame_stride, dt)
        return cls(np.concatenate(frames), np.concatenate(peds), np.concatenate(pos), frame_stride, dt)

    def __len__(self) -> int:
        return len(self.frames)

    def __eq__(self, other):
        if not isinstance(other, SceneDataset):
            return NotImplemented
        return (
            self.frame_stride == other.frame_stride
            and self.dt == other.dt
            and np.array_equal(self.frames, other.frames)
            and np.array_equal(self.ped_ids, other.ped_ids)
            and np.array_equal(self.positions, other.positions)
        )

    def __repr__(self):
        return (
            f"SceneDataset(records={len(self)}, pedestrians={self.num_pedestrians}, "
            f"frames={self.num_frames}, frame_stride={self.frame_stride}, dt={self.dt})"
        )

    @property
    def num_pedestrians(self) -> int:
        return len(np.unique(self.ped_ids))

    @property
    def num_frames(self) -> int:
        return len(np.unique(self.frames))

    @property
    def frame_origin(self) -> int:
        return int(self.frames.min()) if len(self.frames) else 0

    def trajectories(self) -> list[Trajectory]:
        """Per-pedestrian tracks, ordered by ped_id."""
        if not len(self):
            return []
        order = np.lexsort((self.frames, self.ped_ids))
        peds = self.ped_ids[order]
        frames = self.frames[order]
        pos = self.positions[order]
        starts = np.flatnonzero(np.r_[True, peds[1:] != peds[:-1]])
        ends = np.r_[starts[1:], len(peds)]
        origin = self.frame_origin
        return [
            Trajectory(
                ped_id=int(peds[a]),
                start_timestep=int((frames[a] - origin) // self.frame_stride),
                positions=pos[a:b].copy(),
            )
            for a, b in zip(starts, ends)
        ]


def _check_records(frames, peds, positions, stride):
    if len(frames) == 0:
        return
    if frames.min() < 0 or peds.min() < 0:
        raise StructureError("frame_id and ped_id must be non-negative")
    if not np.isfinite(positions).all():
        raise StructureError("positions must be finite")
    order = np.lexsort((frames, peds))
    f, p = frames[order], peds[order]
    same_ped = p[1:] == p[:-1]
    gaps = np.diff(f)
    dup = same_ped & (gaps == 0)
    if dup.any():
        i = np.flatnonzero(dup)[0]
        raise StructureError(f"duplicate record for frame {f[i]}, ped {p[i]}")
    bad = same_ped & (gaps != stride)
    if bad.any():
        i = np.flatnonzero(bad)[0]
        raise StructureError(
            f"ped {p[i]}: frame gap {gaps[i]} between frames {f[i]} and {f[i + 1]} "
            f"is not the frame stride {stride}"
        )
    starts = np.r_[True, ~same_ped]
    counts = np.diff(np.r_[np.flatnonzero(starts), len(p)])
    if (counts < 2).any():
        short = p[np.flatnonzero(starts)[counts < 2][0]]
        raise StructureError(f"ped {short} has fewer than 2 records")


def _read_text(source: Source) -> str:
    if isinstance(source, bytes):
        return source.decode("utf-8")
    if isinstance(source, str):
        return source
    data = source.read()
    return data.decode("utf-8") if isinstance(data, bytes) else data


def _parse_id(token: str, lineno: int, name: str) -> int:
    try:
        return int(token)
    except ValueError:
        pass
    try:
        value = float(token)
    except ValueError:
        raise ParseError(f"{name} {token!r} is not numeric", lineno) from None
    if not value.is_integer():
        raise ParseError(f"{name} {token!r} is not an integer", lineno)
    return int(value)


def _parse_coord(token: str, lineno: int) -> float:
    try:
        value = float(token)
    except ValueError:
        raise ParseError(f"coordinate {token!r} is not numeric", lineno) from None
    if not math.isfinite(value):
        raise ParseError(f"coordinate {token!r} is not finite", lineno)
    return value


def _tokenize(text: str, nfields: int):
    for lineno, line in enumerate(text.splitlines(), start=1):
        tokens = line.split()
        if not tokens:
            continue
        if len(tokens) != nfields:
            raise ParseError(f"expected {nfields} fields, found {len(tokens)}", lineno)
        yield lineno, tokens


def parse_dataset(source: Source, dt: float = 0.4) -> SceneDataset:
    """Parse annotation records into a :class:`SceneDataset`.

    ``source`` is the file content (``str`` or ``bytes``) or an open file.
    The frame stride is the gcd of all within-pedestrian frame gaps; a track
    whose gaps differ from it raises :class:`StructureError`. Tracks with a
    single record are dropped and counted in ``dropped_tracks``.
    """
    frames, peds, xy = [], [], []
    for lineno, tok in _tokenize(_read_text(source), 4):
        frame = _parse_id(tok[0], lineno, "frame_id")
        ped = _parse_id(tok[1], lineno, "ped_id")
        if frame < 0 or ped < 0:
            raise ParseError("frame_id and ped_id must be non-negative", lineno)
        frames.append(frame)
        peds.append(ped)
        xy.append((_parse_coord(tok[2], lineno), _parse_coord(tok[3], lineno)))

    if not frames:
        return SceneDataset.empty(dt=dt)
    frames = np.array(frames, dtype=np.int64)
    peds = np.array(peds, dtype=np.int64)
    xy = np.array(xy, dtype=float)

    ids, counts = np.unique(peds, return_counts=True)
    short = ids[counts < 2]
    if len(short):
        logger.warning("dropping %d track(s) with fewer than 2 records", len(short))
        keep = ~np.isin(peds, short)
        frames, peds, xy = frames[keep], peds[keep], xy[keep]

    stride = _infer_stride(frames, peds)
    data = SceneDataset(frames, peds, xy, frame_stride=stride, dt=dt)
    data.dropped_tracks = len(short)
    return data


def _infer_stride(frames: np.ndarray, peds: np.ndarray) -> int:
    if len(frames) == 0:
        return DEFAULT_FRAME_STRIDE
    order = np.lexsort((frames, peds))
    f, p = frames[order], peds[order]
    gaps = np.diff(f)[p[1:] == p[:-1]]
    dup = gaps == 0
    if dup.any():
        i = np.flatnonzero((p[1:] == p[:-1]) & (np.diff(f) == 0))[0]
        raise StructureError(f"duplicate record for frame {f[i]}, ped {p[i]}")
    return int(np.gcd.reduce(gaps))


def read_dataset(path: str | os.PathLike, dt: float = 0.4) -> SceneDataset:
    with open(path, "rb") as fh:
        return parse_dataset(fh, dt=dt)


def concat_datasets(datasets: Iterable[SceneDataset]) -> SceneDataset:
    """Join recordings of one scene end to end.

    Frames and ped ids of each dataset are shifted past those of the previous
    ones so that no track or frame is shared. All inputs must have the same
    frame stride and dt.
    """
    datasets = [d for d in datasets if len(d)]
    if not datasets:
        return SceneDataset.empty()
    stride, dt = datasets[0].frame_stride, datasets[0].dt
    if any(d.frame_stride != stride or d.dt != dt for d in datasets):
        raise StructureError("datasets differ in frame stride or dt")
    frames, peds, pos = [], [], []
    frame_base = ped_base = 0
    for d in datasets:
        frames.append(d.frames - d.frame_origin + frame_base)
        peds.append(d.ped_ids - d.ped_ids.min() + ped_base)
        pos.append(d.positions)
        frame_base = int(frames[-1].max()) + stride
        ped_base = int(peds[-1].max()) + 1
    return SceneDataset(np.concatenate(frames), np.concatenate(peds), np.concatenate(pos), stride, dt)


def format_float(value: float) -> str:
    """Shortest decimal string that parses back to exactly ``value``.

    Integral values below 1e15 in magnitude drop the fractional part
    (``0.0 -> "0"``, ``-3.0 -> "-3"``, ``-0.0 -> "-0"``); everything else
    uses Python's shortest round-trip ``repr``.
    """
    value = float(value)
    if value.is_integer() and abs(value) < 1e15:
        if value == 0 and math.copysign(1.0, value) < 0:
            return "-0"
        return str(int(value))
    return repr(value)


def format_dataset(data: SceneDataset) -> str:
    buf = io.StringIO()
    for f, p, (x, y) in zip(data.frames.tolist(), data.ped_ids.tolist(), data.positions.tolist()):
        buf.write(f"{f}\t{p}\t{format_float(x)}\t{format_float(y)}\n")
    return buf.getvalue()


def _write_text(text: str, sink) -> None:
    if isinstance(sink, (str, os.PathLike)):
        with open(sink, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    elif isinstance(sink, (io.RawIOBase, io.BufferedIOBase)) or "b" in getattr(sink, "mode", ""):
        sink.write(text.encode("utf-8"))
    else:
        sink.write(text)


def write_dataset(data: SceneDataset, sink) -> None:
    """Write records sorted by (frame_id, ped_id) to a path or open file."""
    _write_text(format_dataset(data), sink)


def parse_predictions(source: Source) -> PredictionSet:
    """Parse a prediction file into a :class:`PredictionSet` without ground truth.

    Every (frame_id, ped_id) must carry sample ids exactly ``0..J-1`` for one
    global ``J``. The horizon ``T`` is the longest per-pedestrian frame count;
    pedestrians predicted over fewer frames are left out and counted in
    ``excluded``.
    """
    rows = []
    for lineno, tok in _tokenize(_read_text(source), 5):
        frame = _parse_id(tok[0], lineno, "frame_id")
        ped = _parse_id(tok[1], lineno, "ped_id")
        sample = _parse_id(tok[2], lineno, "sample_id")
        if min(frame, ped, sample) < 0:
            raise ParseError("ids must be non-negative", lineno)
        rows.append((ped, frame, sample, _parse_coord(tok[3], lineno), _parse_coord(tok[4], lineno)))
    if not rows:
        raise StructureError("prediction file is empty")

    keys = np.array([r[:3] for r in rows], dtype=np.int64)
    xy = np.array([r[3:] for r in rows], dtype=float)
    order = np.lexsort((keys[:, 2], keys[:, 1], keys[:, 0]))
    keys, xy = keys[order], xy[order]

    # group by (ped, frame); sample ids must read 0..J-1 in every group
    new_key = np.r_[True, (keys[1:, :2] != keys[:-1, :2]).any(axis=1)]
    starts = np.flatnonzero(new_key)
    sizes = np.diff(np.r_[starts, len(keys)])
    J = int(sizes.max())
    expected = np.arange(len(keys)) - np.repeat(starts, sizes)
    for g, (a, n) in enumerate(zip(starts, sizes)):
        if n != J or not np.array_equal(keys[a:a + n, 2], expected[a:a + n]):
            ped, frame = keys[a, 0], keys[a, 1]
            raise StructureError(
                f"frame {frame}, ped {ped}: sample ids {keys[a:a + n, 2].tolist()} "
                f"are not 0..{J - 1}"
            )

    group_ped = keys[starts, 0]
    group_frame = keys[starts, 1]
    group_xy = xy.reshape(-1, J, 2)
    ped_ids, first, horizons = np.unique(group_ped, return_index=True, return_counts=True)
    T = int(horizons.max())
    keep = horizons == T
    sel = np.concatenate([np.arange(a, a + T) for a in first[keep]])
    return PredictionSet(
        ped_ids=ped_ids[keep],
        frames=group_frame[sel].reshape(-1, T),
        samples=group_xy[sel].reshape(-1, T, J, 2),
        excluded=int((~keep).sum()),
    )


def read_predictions(path: str | os.PathLike) -> PredictionSet:
    with open(path, "rb") as fh:
        return parse_predictions(fh)


def format_predictions(preds: PredictionSet) -> str:
    n, T, J = preds.num_peds, preds.horizon, preds.J
    frames = np.repeat(preds.frames.reshape(-1), J)
    peds = np.repeat(np.repeat(preds.ped_ids, T), J)
    samples = np.tile(np.arange(J), n * T)
    xy = preds.samples.reshape(-1, 2)
    order = np.lexsort((samples, peds, frames))
    buf = io.StringIO()
    for f, p, s, (x, y) in zip(
        frames[order].tolist(), peds[order].tolist(), samples[order].tolist(), xy[order].tolist()
    ):
        buf.write(f"{f}\t{p}\t{s}\t{format_float(x)}\t{format_float(y)}\n")
    return buf.getvalue()


def write_predictions(preds: PredictionSet, sink) -> None:
    """Write samples sorted by (frame_id, ped_id, sample_id)."""
    _write_text(format_predictions(preds), sink)
