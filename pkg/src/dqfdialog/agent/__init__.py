"""The DQfD learner: configuration, exploration, losses and the training loop."""

from .config import PRESETS, AgentConfig, NetworkConfig, TrainingMode, preset, with_overrides
from .exploration import epsilon_at, select_action
from .losses import LossResult, compute_targets, double_dqn_targets, margin_loss, margin_losses, total_loss
from .metrics_log import PRETRAIN, TRAIN, EpisodeStats, MetricsLog, read_metrics_log
from .trainer import CheckpointRecord, DQfDAgent, RunArtifacts, pretrain, train

__all__ = [
    "PRESETS",
    "AgentConfig",
    "NetworkConfig",
    "TrainingMode",
    "preset",
    "with_overrides",
    "epsilon_at",
    "select_action",
    "LossResult",
    "compute_targets",
    "double_dqn_targets",
    "margin_loss",
    "margin_losses",
    "total_loss",
    "PRETRAIN",
    "TRAIN",
    "EpisodeStats",
    "MetricsLog",
    "read_metrics_log",
    "CheckpointRecord",
    "DQfDAgent",
    "RunArtifacts",
    "pretrain",
    "train",
]
