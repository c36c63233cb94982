"""Dueling Q-network, rectified Adam optimizer and checkpoint files."""

from .checkpoint import Checkpoint, load_checkpoint, save_checkpoint
from .dueling import (
    HIDDEN_SIZE,
    L2_WEIGHT,
    ForwardCache,
    QNetParams,
    backward,
    backward_from_q,
    combine,
    forward,
    forward_cached,
    sync_target,
    td_loss,
)
from .radam import OptState, RAdam, optimizer_step

__all__ = [
    "Checkpoint",
    "load_checkpoint",
    "save_checkpoint",
    "HIDDEN_SIZE",
    "L2_WEIGHT",
    "ForwardCache",
    "QNetParams",
    "backward",
    "backward_from_q",
    "combine",
    "forward",
    "forward_cached",
    "sync_target",
    "td_loss",
    "OptState",
    "RAdam",
    "optimizer_step",
]
