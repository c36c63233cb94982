"""Epsilon schedule and epsilon-greedy action selection."""

import numpy as np

from .config import AgentConfig


def epsilon_at(frame: int, config: AgentConfig) -> float:
    """
    Linearly decayed exploration rate.

    ``epsilon_start`` at frame 0, ``epsilon_end`` from ``epsilon_decay_frames``
    on. Frames count from the start of epsilon-greedy acting.
    """
    if frame < 0:
        raise ValueError(f"frame must be non-negative, got {frame}")
    if config.epsilon_decay_frames == 0 or frame >= config.epsilon_decay_frames:
        return config.epsilon_end
    fraction = frame / config.epsilon_decay_frames
    return config.epsilon_start + fraction * (config.epsilon_end - config.epsilon_start)


def select_action(q: np.ndarray, epsilon: float, rng: np.random.Generator) -> int:
    """
    Epsilon-greedy choice; the greedy branch breaks ties toward the lowest index.

    Raises:
        ValueError: If q is empty
    """
    q = np.asarray(q)
    if q.size == 0:
        raise ValueError("Cannot select an action from an empty Q vector")
    if rng.random() < epsilon:
        return int(rng.integers(q.size))
    return int(np.argmax(q))
