"""Evaluation of frozen policies, checkpoint selection and trend output."""

from .calibration import ACCEPTABLE_BAND, ERROR_RATE_GRID, TARGET_SUCCESS_RATE, CalibrationResult, calibrate_error_rate
from .checkpoints import MOVING_AVERAGE_WINDOW, checkpoint_scores, moving_average, select_best_checkpoint
from .metrics import EpisodeResult, MetricsReport, episode_seeds, run_episode, run_episodes
from .trends import TRENDS_HEADER, TrendChart, TrendSeries, emit_trends, trend_series, write_trends_csv

__all__ = [
    "ACCEPTABLE_BAND",
    "ERROR_RATE_GRID",
    "TARGET_SUCCESS_RATE",
    "CalibrationResult",
    "calibrate_error_rate",
    "MOVING_AVERAGE_WINDOW",
    "checkpoint_scores",
    "moving_average",
    "select_best_checkpoint",
    "EpisodeResult",
    "MetricsReport",
    "episode_seeds",
    "run_episode",
    "run_episodes",
    "TRENDS_HEADER",
    "TrendChart",
    "TrendSeries",
    "emit_trends",
    "trend_series",
    "write_trends_csv",
]
