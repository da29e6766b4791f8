"""Synthetic pedestrian trajectories sampled from real scene statistics."""

__version__ = "0.1.0"

from pedsynth.io import (
    ParseError,
    SceneDataset,
    StructureError,
    Trajectory,
    concat_datasets,
    parse_dataset,
    parse_predictions,
    read_dataset,
    read_predictions,
    write_dataset,
    write_predictions,
)
from pedsynth.metrics import MetricsReport, PredictionSet, ade, evaluate, fde, mde, quantile_curve
from pedsynth.paths import DegeneratePathError, PathSpline, fit_path, perturb
from pedsynth.statistics import (
    SceneStatistics,
    compute_statistics,
    frame_count_stats,
    pooled_speed_variance,
    step_speeds,
)
from pedsynth.sampler import (
    RejectionLimitError,
    SamplerConfig,
    SyntheticScene,
    generate_dataset,
    generate_scenes,
    sample_crowd_size,
    sample_scene,
    sample_speed,
    sample_truncated_normal,
)
from pedsynth.baseline import PredictorConfig, predict
