"""Moving averages over the training log and best-checkpoint selection."""

import logging
from typing import List, Sequence

import numpy as np

from ..agent.metrics_log import TRAIN, EpisodeStats
from ..agent.trainer import CheckpointRecord
from ..errors import ContractViolation

logger = logging.getLogger(__name__)

MOVING_AVERAGE_WINDOW = 100


def moving_average(series: Sequence[float], window: int) -> np.ndarray:
    """
    Trailing mean of ``series``.

    The first ``window - 1`` entries average over the prefix available so far.

    Args:
        series: Values in log order
        window: Number of trailing values per mean

    Returns:
        Float array of the same length

    Raises:
        ValueError: If window < 1
    """
    if window < 1:
        raise ValueError(f"window must be at least 1, got {window}")
    values = np.asarray(series, dtype=np.float64)
    if values.size == 0:
        return values
    sums = np.cumsum(values)
    n = values.size
    lagged = np.concatenate([np.zeros(min(window, n)), sums[: max(n - window, 0)]])
    counts = np.minimum(np.arange(1, n + 1), window)
    return (sums - lagged) / counts


def checkpoint_scores(
    episodes: Sequence[EpisodeStats],
    checkpoints: Sequence[CheckpointRecord],
    window: int = MOVING_AVERAGE_WINDOW,
) -> List[float]:
    """
    Trailing moving-average return at each checkpoint's frame.

    Only training-phase episodes count. A checkpoint saved before any
    training episode finished scores ``-inf``.
    """
    train = [e for e in episodes if e.phase == TRAIN]
    averaged = moving_average([e.return_ for e in train], window)
    frames = np.array([e.frame for e in train], dtype=np.int64)
    scores = []
    for record in checkpoints:
        finished = int(np.searchsorted(frames, record.frame, side="right"))
        scores.append(float(averaged[finished - 1]) if finished else float("-inf"))
    return scores


def select_best_checkpoint(
    episodes: Sequence[EpisodeStats],
    checkpoints: Sequence[CheckpointRecord],
    window: int = MOVING_AVERAGE_WINDOW,
) -> int:
    """
    Index of the checkpoint with the best trailing moving-average return.

    Ties go to the earliest checkpoint.

    Raises:
        ContractViolation: If the run has no checkpoints
    """
    if not checkpoints:
        raise ContractViolation("Run has no checkpoints to select from")
    scores = checkpoint_scores(episodes, checkpoints, window)
    best = int(np.argmax(scores))
    logger.info(f"Best checkpoint: frame {checkpoints[best].frame} (moving-average return {scores[best]:.2f})")
    return best
