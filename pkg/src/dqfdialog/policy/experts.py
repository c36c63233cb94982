"""Demonstration sources: the rule expert and its corrupted weak variant."""

import logging
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Tuple, Union

import numpy as np

from ..dialog.actions import ActionSpace, TemplateKind, enumerate_actions
from ..dialog.database import EntityDatabase
from ..dialog.models import DialogState, Intent, Ontology
from .base import Policy

logger = logging.getLogger(__name__)

# Random turns a single corruption of the weak expert lasts
LAPSE_TURNS = 8


class ExpertKind(Enum):
    """Which expert produces demonstrations."""
    RULE = "rule"
    WEAK = "weak"


@dataclass(frozen=True)
class ExpertSpec:
    """An expert kind plus, for the weak expert, its action error rate."""
    kind: ExpertKind = ExpertKind.RULE
    error_rate: float = 0.0

    def __post_init__(self):
        """Validate the error rate."""
        if not 0.0 <= self.error_rate <= 1.0:
            raise ValueError(f"error_rate must be between 0.0 and 1.0, got {self.error_rate}")

    def __str__(self) -> str:
        if self.kind == ExpertKind.WEAK:
            return f"weak(error_rate={self.error_rate:g})"
        return self.kind.value


def rule_act(
    state: DialogState,
    ontology: Ontology,
    db: EntityDatabase,
    actions: Optional[ActionSpace] = None,
) -> int:
    """
    Hand-written expert: a deterministic priority cascade.

    1. A pending user request in a domain with an offered entity: Inform it.
    2. An active domain that still has several candidates (any non-database
       domain) and an unconstrained informable slot: Request that slot.
    3. A domain where the user signaled booking, with a candidate available
       (non-database: every informable slot constrained) and not yet booked:
       Book when every booking slot is known, else OfferBooking.
    4. An active database domain with no matches: NoOffer.
    5. The user said goodbye: Bye.
    6. Otherwise ReqMore.

    Domains are scanned in ontology order, slots in declaration order.

    Args:
        state: Current dialog state
        ontology: Ontology the state belongs to
        db: Entity database (unused by the cascade, kept for a uniform signature)
        actions: Action space; enumerated from the ontology when omitted

    Returns:
        Action index
    """
    actions = actions or enumerate_actions(ontology)

    for spec in ontology.domains:
        tracked = state[spec.name]
        if tracked.requested and tracked.offered_entity is not None:
            return actions.find(TemplateKind.INFORM, spec.name, tracked.requested[0])

    for spec in ontology.domains:
        tracked = state[spec.name]
        if not tracked.active:
            continue
        if spec.database and tracked.db_count <= 1:
            continue
        for slot in spec.informable:
            if slot not in tracked.constraints:
                return actions.find(TemplateKind.REQUEST, spec.name, slot)

    for spec in ontology.domains:
        tracked = state[spec.name]
        if not spec.bookable or tracked.booked:
            continue
        if not any(slot in tracked.constraints for slot in spec.booking):
            continue
        if spec.database:
            available = tracked.db_count >= 1 and tracked.offered_entity is not None
        else:
            available = all(slot in tracked.constraints for slot in spec.informable)
        if not available:
            continue
        if all(slot in tracked.constraints for slot in spec.booking):
            return actions.find(TemplateKind.BOOK, spec.name)
        return actions.find(TemplateKind.OFFER_BOOKING, spec.name)

    for spec in ontology.domains:
        tracked = state[spec.name]
        if spec.database and tracked.active and tracked.db_count == 0:
            return actions.find(TemplateKind.NO_OFFER, spec.name)

    if state.user_said(Intent.BYE):
        return actions.find(TemplateKind.BYE)
    return actions.find(TemplateKind.REQ_MORE)


def _corruption_draw(rng: np.random.Generator, error_rate: float, action_count: int) -> Tuple[bool, int]:
    """Draw the corruption coin and the random action; always two rng values."""
    corrupt = rng.random() < error_rate
    return corrupt, int(rng.integers(action_count))


def weak_act(
    state: DialogState,
    ontology: Ontology,
    db: EntityDatabase,
    error_rate: float,
    rng: np.random.Generator,
    actions: Optional[ActionSpace] = None,
) -> int:
    """
    Corrupted expert: the rule action with probability ``1 - error_rate``,
    otherwise a uniformly random action.

    The random draw happens on every call so the rng stream does not depend
    on the state.
    """
    actions = actions or enumerate_actions(ontology)
    corrupt, random_action = _corruption_draw(rng, error_rate, len(actions))
    if corrupt:
        return random_action
    return rule_act(state, ontology, db, actions)


class RulePolicy(Policy):
    """Policy wrapper around ``rule_act``."""

    name = "rule"

    def __init__(self, ontology: Ontology, db: EntityDatabase, actions: Optional[ActionSpace] = None):
        self.ontology = ontology
        self.db = db
        self.actions = actions or enumerate_actions(ontology)

    def act(self, state: DialogState) -> int:
        return rule_act(state, self.ontology, self.db, self.actions)


class WeakExpertPolicy(Policy):
    """
    Weak expert with lapses: a corrupted turn starts a run of ``lapse_turns``
    uniformly random actions, after which the rule cascade resumes.

    With ``lapse_turns=1`` every call is an independent ``weak_act``. Error
    rate 0 never lapses and error rate 1 is always random, so both ends of
    the range match ``weak_act``. The lapse counter is reset
    by ``init_session``.
    """

    name = "weak"

    def __init__(
        self,
        ontology: Ontology,
        db: EntityDatabase,
        error_rate: float,
        rng: Union[np.random.Generator, int, None] = None,
        actions: Optional[ActionSpace] = None,
        lapse_turns: int = LAPSE_TURNS,
    ):
        if not 0.0 <= error_rate <= 1.0:
            raise ValueError(f"error_rate must be between 0.0 and 1.0, got {error_rate}")
        if lapse_turns < 1:
            raise ValueError(f"lapse_turns must be positive, got {lapse_turns}")
        self.ontology = ontology
        self.db = db
        self.error_rate = error_rate
        self.lapse_turns = lapse_turns
        self.rng = rng if isinstance(rng, np.random.Generator) else np.random.default_rng(rng)
        self.actions = actions or enumerate_actions(ontology)
        self._lapse_left = 0

    def init_session(self) -> None:
        self._lapse_left = 0

    def act(self, state: DialogState) -> int:
        corrupt, random_action = _corruption_draw(self.rng, self.error_rate, len(self.actions))
        if self._lapse_left > 0:
            self._lapse_left -= 1
            return random_action
        if corrupt:
            self._lapse_left = self.lapse_turns - 1
            return random_action
        return rule_act(state, self.ontology, self.db, self.actions)


def make_expert(
    spec: ExpertSpec,
    ontology: Ontology,
    db: EntityDatabase,
    rng: Union[np.random.Generator, int, None] = None,
    actions: Optional[ActionSpace] = None,
) -> Policy:
    """Build the expert policy described by ``spec``."""
    if spec.kind == ExpertKind.WEAK:
        return WeakExpertPolicy(ontology, db, spec.error_rate, rng, actions)
    return RulePolicy(ontology, db, actions)
