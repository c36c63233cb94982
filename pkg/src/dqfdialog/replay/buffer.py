"""Prioritized replay with a protected demonstration partition."""

import logging
from dataclasses import dataclass
from typing import List, Optional

import numpy as np

from ..errors import ContractViolation
from .sum_tree import SumTree

logger = logging.getLogger(__name__)


@dataclass
class Transition:
    """One (s, a, r, s') step; ``is_demo`` marks expert transitions."""
    s: np.ndarray
    a: int
    r: float
    s_next: np.ndarray
    terminal: bool
    is_demo: bool = False


@dataclass
class BufferConfig:
    """Replay parameters."""
    capacity: int = 100_000
    alpha: float = 0.6
    beta: float = 0.4
    eps_p: float = 0.001
    eps_d: float = 0.01
    stratified: bool = True

    def __post_init__(self):
        """Validate configuration values."""
        if self.capacity < 1:
            raise ValueError(f"capacity must be positive, got {self.capacity}")
        if self.alpha < 0:
            raise ValueError(f"alpha must be non-negative, got {self.alpha}")
        if not 0.0 <= self.beta <= 1.0:
            raise ValueError(f"beta must be between 0.0 and 1.0, got {self.beta}")
        if self.eps_p <= 0:
            raise ValueError(f"eps_p must be positive, got {self.eps_p}")
        if self.eps_d < 0:
            raise ValueError(f"eps_d must be non-negative, got {self.eps_d}")


@dataclass
class Batch:
    """A sampled minibatch with its buffer indices and importance weights."""
    states: np.ndarray
    actions: np.ndarray
    rewards: np.ndarray
    next_states: np.ndarray
    terminals: np.ndarray
    is_demo: np.ndarray
    indices: np.ndarray
    is_weights: np.ndarray

    def __len__(self) -> int:
        return len(self.actions)

    @property
    def transitions(self) -> List[Transition]:
        return [
            Transition(self.states[i], int(self.actions[i]), float(self.rewards[i]),
                       self.next_states[i], bool(self.terminals[i]), bool(self.is_demo[i]))
            for i in range(len(self))
        ]


class SumTreeBuffer:
    """
    Proportional prioritized replay buffer.

    Demonstrations are pushed first and stored in a partition that is never
    overwritten; they do not count against ``capacity``. Agent transitions
    follow in a ring of ``capacity`` slots starting right after the demos.
    The sum tree holds ``priority ** alpha`` per slot.

    Args:
        state_length: Length of state vectors
        config: Replay parameters
        action_count: Size of the action space; actions are checked against it when given

    Example:
        >>> buffer = SumTreeBuffer(87, action_count=27)
        >>> buffer.push(Transition(s, 3, -1.0, s2, False, is_demo=True))
        >>> batch = buffer.sample(32, rng)
    """

    def __init__(self, state_length: int, config: Optional[BufferConfig] = None, action_count: Optional[int] = None):
        self.state_length = state_length
        self.action_count = action_count
        self.config = config or BufferConfig()
        self.demo_count = 0
        self.agent_pushes = 0
        self.max_priority = 1.0
        self.tree = SumTree(16)

        self._allocated = 0
        self.states = np.zeros((0, state_length), dtype=np.uint8)
        self.next_states = np.zeros((0, state_length), dtype=np.uint8)
        self.actions = np.zeros(0, dtype=np.int64)
        self.rewards = np.zeros(0, dtype=np.float64)
        self.terminals = np.zeros(0, dtype=bool)
        self.is_demo = np.zeros(0, dtype=bool)
        self.priorities = np.zeros(0, dtype=np.float64)

    @property
    def agent_phase(self) -> bool:
        return self.agent_pushes > 0

    @property
    def agent_count(self) -> int:
        return min(self.agent_pushes, self.config.capacity)

    @property
    def cursor(self) -> int:
        """Agent-region slot the next agent transition goes to."""
        return self.agent_pushes % self.config.capacity

    def __len__(self) -> int:
        return self.demo_count + self.agent_count

    def _reserve(self, count: int) -> None:
        if count <= self._allocated:
            return
        new_size = max(count, 2 * self._allocated, 64)
        if self.agent_phase:
            new_size = max(count, min(new_size, self.demo_count + self.config.capacity))

        def grown(array):
            shape = (new_size,) + array.shape[1:]
            out = np.zeros(shape, dtype=array.dtype)
            out[:len(array)] = array
            return out

        self.states = grown(self.states)
        self.next_states = grown(self.next_states)
        self.actions = grown(self.actions)
        self.rewards = grown(self.rewards)
        self.terminals = grown(self.terminals)
        self.is_demo = grown(self.is_demo)
        self.priorities = grown(self.priorities)
        self._allocated = new_size
        self.tree.grow(new_size)

    def push(self, t: Transition) -> int:
        """
        Store a transition with the current maximum priority.

        Args:
            t: Transition; demos must come before any agent transition

        Returns:
            Buffer index written

        Raises:
            ContractViolation: On a demo push after the agent phase began
            ValueError: On a state vector of the wrong length or an action outside the action space
        """
        if len(t.s) != self.state_length or len(t.s_next) != self.state_length:
            raise ValueError(f"State vectors must have length {self.state_length}")
        if t.a < 0 or (self.action_count is not None and t.a >= self.action_count):
            raise ValueError(f"Action {t.a} is outside the action space [0, {self.action_count or 'inf'})")
        if t.is_demo:
            if self.agent_phase:
                raise ContractViolation("Demonstrations can only be loaded before agent transitions")
            index = self.demo_count
            self.demo_count += 1
        else:
            index = self.demo_count + self.cursor
            self.agent_pushes += 1
        self._reserve(index + 1)

        self.states[index] = t.s
        self.next_states[index] = t.s_next
        self.actions[index] = t.a
        self.rewards[index] = t.r
        self.terminals[index] = t.terminal
        self.is_demo[index] = t.is_demo
        self.priorities[index] = self.max_priority
        self.tree.update(index, self.max_priority ** self.config.alpha)
        return index

    def probabilities(self) -> np.ndarray:
        """Sampling probability of every stored transition."""
        mass = self.tree.leaves(len(self))
        return mass / mass.sum()

    def sample(self, batch_size: int, rng: np.random.Generator) -> Batch:
        """
        Draw a prioritized minibatch.

        Raises:
            ContractViolation: If the buffer is empty
        """
        n = len(self)
        if n == 0:
            raise ContractViolation("Cannot sample from an empty replay buffer")
        total = self.tree.total
        if self.config.stratified:
            segment = total / batch_size
            masses = (np.arange(batch_size) + rng.random(batch_size)) * segment
        else:
            masses = rng.random(batch_size) * total
        indices = self.tree.find(masses)

        probs = self.tree.leaf(indices) / total
        weights = (n * probs) ** (-self.config.beta)
        weights = weights / weights.max()
        return Batch(
            states=self.states[indices],
            actions=self.actions[indices],
            rewards=self.rewards[indices],
            next_states=self.next_states[indices],
            terminals=self.terminals[indices],
            is_demo=self.is_demo[indices],
            indices=indices,
            is_weights=weights,
        )

    def update_priorities(self, indices, td_errors) -> None:
        """
        Set ``p = |delta| + eps_p (+ eps_d for demos)`` for sampled slots.

        Raises:
            IndexError: If an index does not refer to a stored transition
        """
        indices = self._checked(indices)
        priorities = np.abs(np.asarray(td_errors, dtype=np.float64)) + self.config.eps_p
        priorities = priorities + self.config.eps_d * self.is_demo[indices]
        self.set_priorities(indices, priorities)

    def set_priorities(self, indices, priorities) -> None:
        """Store raw priorities and their ``p ** alpha`` tree mass."""
        indices = self._checked(indices)
        priorities = np.asarray(priorities, dtype=np.float64)
        if np.any(priorities <= 0):
            raise ValueError("Priorities must be positive")
        self.priorities[indices] = priorities
        self.tree.update(indices, priorities ** self.config.alpha)
        self.max_priority = max(self.max_priority, float(priorities.max(initial=0.0)))

    def _checked(self, indices) -> np.ndarray:
        indices = np.atleast_1d(np.asarray(indices, dtype=np.int64))
        if indices.size and (indices.min() < 0 or indices.max() >= len(self)):
            raise IndexError(f"Priority update index out of range [0, {len(self)})")
        return indices

    def verify(self) -> bool:
        """Check the sum-tree invariant and rebuild if it drifted."""
        if self.tree.verify():
            return True
        logger.warning("Sum tree drifted from its leaf sum; rebuilding")
        self.tree.rebuild()
        return False

    def demo_transitions(self) -> List[Transition]:
        return [self.transition(i) for i in range(self.demo_count)]

    def transition(self, index: int) -> Transition:
        return Transition(
            self.states[index].copy(), int(self.actions[index]), float(self.rewards[index]),
            self.next_states[index].copy(), bool(self.terminals[index]), bool(self.is_demo[index]),
        )


def push(buffer: SumTreeBuffer, t: Transition) -> int:
    return buffer.push(t)


def sample(buffer: SumTreeBuffer, batch_size: int, rng: np.random.Generator) -> Batch:
    return buffer.sample(batch_size, rng)


def update_priorities(buffer: SumTreeBuffer, indices, td_errors) -> None:
    buffer.update_priorities(indices, td_errors)
