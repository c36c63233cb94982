"""Learned and baseline policies."""

from typing import List, Optional, Tuple, Union

import numpy as np

from ..dialog.featurizer import StateFeaturizer
from ..dialog.models import DialogState
from ..network.dueling import QNetParams, forward
from .base import Policy


class GreedyQPolicy(Policy):
    """Acts greedily on a frozen Q-network; ties go to the lowest index."""

    name = "greedy"

    def __init__(self, params: QNetParams, featurizer: StateFeaturizer):
        if params.input_size != featurizer.length:
            raise ValueError(
                f"Network expects {params.input_size} features, featurizer produces {featurizer.length}"
            )
        self.params = params
        self.featurizer = featurizer

    def q_values(self, state: DialogState) -> np.ndarray:
        return forward(self.params, self.featurizer.featurize(state))

    def act(self, state: DialogState) -> int:
        return int(np.argmax(self.q_values(state)))

    def top_actions(self, state: DialogState, k: int = 5) -> List[Tuple[int, float]]:
        """The k best actions with their Q-values, best first."""
        q = self.q_values(state)
        order = np.argsort(-q, kind="stable")[:k]
        return [(int(i), float(q[i])) for i in order]


class RandomPolicy(Policy):
    """Uniformly random actions."""

    name = "random"

    def __init__(self, action_count: int, rng: Union[np.random.Generator, int, None] = None):
        self.action_count = action_count
        self.rng = rng if isinstance(rng, np.random.Generator) else np.random.default_rng(rng)

    def act(self, state: Optional[DialogState]) -> int:
        return int(self.rng.integers(self.action_count))
