"""Double-DQN targets, the expert large-margin loss and the combined objective."""

from dataclasses import dataclass

import numpy as np

from ..errors import NonFiniteError
from ..network.dueling import QNetParams, backward_from_q, forward, forward_cached, td_errors
from ..replay.buffer import Batch
from .config import AgentConfig


def double_dqn_targets(
    rewards: np.ndarray,
    terminals: np.ndarray,
    q_next_online: np.ndarray,
    q_next_target: np.ndarray,
    gamma: float,
) -> np.ndarray:
    """``r`` for terminal steps, else ``r + gamma * Q_target(s', argmax_a Q_online(s', a))``."""
    best = np.argmax(q_next_online, axis=1)
    bootstrap = q_next_target[np.arange(len(best)), best]
    return np.asarray(rewards, dtype=np.float64) + gamma * np.where(terminals, 0.0, bootstrap)


def compute_targets(batch: Batch, online: QNetParams, target: QNetParams, gamma: float) -> np.ndarray:
    """Double-DQN regression targets for a sampled batch."""
    return double_dqn_targets(
        batch.rewards,
        batch.terminals,
        forward(online, batch.next_states),
        forward(target, batch.next_states),
        gamma,
    )


def margin_losses(q: np.ndarray, expert_actions: np.ndarray, tau: float):
    """
    Per-sample ``max_a [Q(s, a) + l(a_E, a)] - Q(s, a_E)``.

    Returns:
        (losses, argmax of the margin-augmented Q per sample)
    """
    q = np.atleast_2d(q)
    expert_actions = np.atleast_1d(expert_actions)
    rows = np.arange(len(expert_actions))
    augmented = q + tau
    augmented[rows, expert_actions] = q[rows, expert_actions]
    best = np.argmax(augmented, axis=1)
    return augmented[rows, best] - q[rows, expert_actions], best


def margin_loss(q: np.ndarray, a_e: int, tau: float) -> float:
    """
    Large-margin loss of one state.

    Example:
        >>> margin_loss(np.array([1.0, 2.0]), 0, 0.5)
        1.5
    """
    losses, _ = margin_losses(np.asarray(q, dtype=np.float64)[None, :], np.array([a_e]), tau)
    return float(losses[0])


@dataclass
class LossResult:
    """Loss value, its parts, gradients and TD errors for priority updates."""
    loss: float
    td_part: float
    margin_part: float
    l2_part: float
    delta: np.ndarray
    grads: QNetParams


def total_loss(
    batch: Batch,
    online: QNetParams,
    target: QNetParams,
    config: AgentConfig,
    l2_weight: float = 0.0,
) -> LossResult:
    """
    Combined objective over one batch of size B::

        J = mean_i(w_i * delta_i^2) + margin_weight * sum_{i demo} margin_i + l2 * |theta|^2

    The margin term only applies in modes that use it; importance weights do
    not scale it. ``delta`` excludes the margin term.

    Raises:
        NonFiniteError: If targets or the loss are not finite
    """
    y = compute_targets(batch, online, target, config.gamma)
    if not np.all(np.isfinite(y)):
        raise NonFiniteError(f"Non-finite TD target (max |y| = {np.nanmax(np.abs(y))})")

    cache = forward_cached(online, batch.states)
    actions = np.asarray(batch.actions, dtype=np.int64)
    delta = td_errors(cache.q, actions, y)
    size = len(actions)
    rows = np.arange(size)
    weights = np.asarray(batch.is_weights, dtype=np.float64)

    grad_q = np.zeros_like(cache.q)
    grad_q[rows, actions] = -2.0 * weights * delta / size
    td_part = float(np.mean(weights * delta**2))

    margin_part = 0.0
    demo = np.flatnonzero(batch.is_demo)
    if config.mode.uses_margin and demo.size and config.margin_weight:
        losses, best = margin_losses(cache.q[demo], actions[demo], config.tau)
        scale = config.margin_weight
        margin_part = float(scale * losses.sum())
        np.add.at(grad_q, (demo, best), scale)
        np.add.at(grad_q, (demo, actions[demo]), -scale)

    l2_part = float(l2_weight * online.squared_norm())
    loss = td_part + margin_part + l2_part
    if not np.isfinite(loss):
        raise NonFiniteError(f"Non-finite loss (td={td_part}, margin={margin_part}, l2={l2_part})")
    grads = backward_from_q(online, cache, grad_q, l2_weight)
    return LossResult(loss=loss, td_part=td_part, margin_part=margin_part, l2_part=l2_part, delta=delta, grads=grads)
