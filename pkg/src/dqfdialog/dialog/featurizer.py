"""Binary featurization of dialog states.

Layout, per domain in ontology order:

- constraint flags: for each informable slot, one flag per declared value
  plus one ``dontcare`` flag; for each booking slot, one flag per value
- requested-slot flags, one per requestable slot
- database count buckets ``0``, ``1``, ``2-4``, ``>=5`` (database-backed only)
- offered flag, booked flag

followed by the global block: one flag per user intent present in the last
user turn (Intent declaration order), the terminal flag, and turn buckets
``0``, ``1-2``, ``3-5``, ``6-10``, ``11-20``, ``>=21``.

Length::

    L = 15 + sum_d (sum_{s in I_d} (|V_s| + 1) + sum_{b in B_d} |V_b|
                    + |R_d| + 4*[database_d] + 2)

The desk ontology gives 29 (hotel) + 30 (restaurant) + 13 (taxi) + 15 = 87.
"""

from typing import Dict, List, Tuple

import numpy as np

from .models import DialogState, Intent, Ontology

DB_BUCKETS: List[Tuple[int, float]] = [(0, 0), (1, 1), (2, 4), (5, float("inf"))]
TURN_BUCKETS: List[Tuple[int, float]] = [(0, 0), (1, 2), (3, 5), (6, 10), (11, 20), (21, float("inf"))]
GLOBAL_WIDTH = len(Intent) + 1 + len(TURN_BUCKETS)

Position = Tuple[str, ...]


def _bucket(value: int, buckets: List[Tuple[int, float]]) -> int:
    for index, (low, high) in enumerate(buckets):
        if low <= value <= high:
            return index
    raise ValueError(f"{value} is outside every bucket")


def state_length(ontology: Ontology) -> int:
    """Evaluate the layout formula on an ontology."""
    total = GLOBAL_WIDTH
    for spec in ontology.domains:
        total += sum(len(v) + 1 for v in spec.informable.values())
        total += sum(len(v) for v in spec.booking.values())
        total += len(spec.requestable) + (len(DB_BUCKETS) if spec.database else 0) + 2
    return total


class StateFeaturizer:
    """
    Maps DialogState to a fixed-length 0/1 vector.

    Positions are named tuples such as ``("hotel", "constraint", "area",
    "north")`` or ``("global", "turn", "0")``; ``position()`` resolves a
    name to its index.
    """

    def __init__(self, ontology: Ontology):
        self.ontology = ontology
        self.names: List[Position] = []
        for spec in ontology.domains:
            d = spec.name
            for slot in spec.constraint_slots:
                self.names.extend((d, "constraint", slot, value) for value in spec.values(slot))
            self.names.extend((d, "requested", slot) for slot in spec.requestable)
            if spec.database:
                self.names.extend((d, "db", str(i)) for i in range(len(DB_BUCKETS)))
            self.names.append((d, "offered"))
            self.names.append((d, "booked"))
        self.names.extend(("global", "intent", intent.value) for intent in Intent)
        self.names.append(("global", "terminal"))
        self.names.extend(("global", "turn", str(i)) for i in range(len(TURN_BUCKETS)))

        self._positions: Dict[Position, int] = {name: i for i, name in enumerate(self.names)}
        assert len(self.names) == state_length(ontology), "layout disagrees with the length formula"

    @property
    def length(self) -> int:
        return len(self.names)

    def position(self, *name: str) -> int:
        return self._positions[tuple(name)]

    def featurize(self, state: DialogState) -> np.ndarray:
        """
        Encode a state as a binary vector.

        Args:
            state: State consistent with the ontology

        Returns:
            uint8 vector of length ``self.length``
        """
        x = np.zeros(self.length, dtype=np.uint8)
        pos = self._positions
        for spec in self.ontology.domains:
            d = spec.name
            tracked = state[d]
            for slot, value in tracked.constraints.items():
                index = pos.get((d, "constraint", slot, value))
                if index is not None:
                    x[index] = 1
            for slot in tracked.requested:
                x[pos[(d, "requested", slot)]] = 1
            if spec.database:
                x[pos[(d, "db", str(_bucket(tracked.db_count, DB_BUCKETS)))]] = 1
            x[pos[(d, "offered")]] = tracked.offered_entity is not None
            x[pos[(d, "booked")]] = tracked.booked
        for act in state.last_user_acts:
            x[pos[("global", "intent", act.intent.value)]] = 1
        x[pos[("global", "terminal")]] = state.terminated
        x[pos[("global", "turn", str(_bucket(state.turn, TURN_BUCKETS)))]] = 1
        return x


def featurize(state: DialogState, ontology: Ontology) -> np.ndarray:
    """Functional form of ``StateFeaturizer.featurize``."""
    return StateFeaturizer(ontology).featurize(state)
