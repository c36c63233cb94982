"""User goals and their sampling."""

import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Mapping, Optional

import numpy as np

from ..dialog.database import Entity, EntityDatabase
from ..dialog.models import DONTCARE, Ontology
from ..errors import GoalSamplingError

logger = logging.getLogger(__name__)

MAX_SAMPLING_TRIES = 1000


@dataclass
class DomainGoal:
    """What the user wants from one domain."""
    constraints: Dict[str, str] = field(default_factory=dict)
    requests: List[str] = field(default_factory=list)
    wants_booking: bool = False
    booking: Dict[str, str] = field(default_factory=dict)

    def matches(self, entity: Mapping[str, str]) -> bool:
        """Whether an entity satisfies every non-dontcare constraint."""
        return all(entity.get(s) == v for s, v in self.constraints.items() if v != DONTCARE)

    def first_violation(self, entity: Mapping[str, str]) -> Optional[str]:
        for slot, value in self.constraints.items():
            if value != DONTCARE and entity.get(slot) != value:
                return slot
        return None


@dataclass
class UserGoal:
    """A user goal spanning one to three domains, in conversation order."""
    domains: Dict[str, DomainGoal] = field(default_factory=dict)

    def __getitem__(self, domain: str) -> DomainGoal:
        return self.domains[domain]

    def __contains__(self, domain: str) -> bool:
        return domain in self.domains

    @property
    def request_slots(self) -> List[tuple]:
        return [(d, s) for d, g in self.domains.items() for s in g.requests]

    @property
    def wanted_bookings(self) -> List[str]:
        return [d for d, g in self.domains.items() if g.wants_booking]

    def consistent_entities(self, db: EntityDatabase, domain: str) -> List[Entity]:
        return db.query(domain, self.domains[domain].constraints)

    def to_dict(self) -> Dict[str, Any]:
        return {
            d: {"constraints": dict(g.constraints), "requests": list(g.requests),
                "wants_booking": g.wants_booking, "booking": dict(g.booking)}
            for d, g in self.domains.items()
        }

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "UserGoal":
        return cls(domains={
            d: DomainGoal(dict(g["constraints"]), list(g["requests"]), bool(g["wants_booking"]), dict(g["booking"]))
            for d, g in data.items()
        })


@dataclass
class GoalConfig:
    """Parameters of goal sampling."""
    min_domains: int = 1
    max_domains: int = 3
    dontcare_probability: float = 0.1
    booking_probability: float = 0.5

    def __post_init__(self):
        """Validate configuration values."""
        if not 1 <= self.min_domains <= self.max_domains:
            raise ValueError(f"Need 1 <= min_domains <= max_domains, got {self.min_domains}..{self.max_domains}")
        for name in ("dontcare_probability", "booking_probability"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ValueError(f"{name} must be between 0.0 and 1.0, got {value}")


def _sample_domain(ontology: Ontology, domain: str, rng: np.random.Generator, config: GoalConfig) -> DomainGoal:
    spec = ontology.domain(domain)
    goal = DomainGoal()
    for slot, values in spec.informable.items():
        if rng.random() < config.dontcare_probability:
            goal.constraints[slot] = DONTCARE
        else:
            goal.constraints[slot] = values[int(rng.integers(len(values)))]
    if spec.database and spec.requestable:
        count = int(rng.integers(1, len(spec.requestable) + 1))
        chosen = set(int(i) for i in rng.choice(len(spec.requestable), size=count, replace=False))
        goal.requests = [s for i, s in enumerate(spec.requestable) if i in chosen]
    if spec.bookable:
        goal.wants_booking = (not spec.database) or (not goal.requests) or rng.random() < config.booking_probability
    if goal.wants_booking:
        goal.booking = {slot: values[int(rng.integers(len(values)))] for slot, values in spec.booking.items()}
    return goal


def sample_goal(
    ontology: Ontology,
    db: EntityDatabase,
    rng: np.random.Generator,
    config: Optional[GoalConfig] = None,
    max_tries: int = MAX_SAMPLING_TRIES,
) -> UserGoal:
    """
    Sample a satisfiable user goal.

    Constraints of database-backed domains are re-drawn until at least one
    entity matches; the tries are shared across the goal's domains.

    Args:
        ontology: Ontology to draw from
        db: Database used for the satisfiability check
        rng: Seeded generator; the goal is deterministic given its state
        config: Sampling parameters
        max_tries: Rejection budget

    Returns:
        A satisfiable UserGoal

    Raises:
        GoalSamplingError: If the rejection budget is exhausted
    """
    config = config or GoalConfig()
    names = ontology.domain_names
    high = min(config.max_domains, len(names))
    low = min(config.min_domains, high)
    count = int(rng.integers(low, high + 1))
    chosen = [names[int(i)] for i in rng.choice(len(names), size=count, replace=False)]

    goal = UserGoal()
    tries = 0
    for domain in chosen:
        while True:
            tries += 1
            if tries > max_tries:
                raise GoalSamplingError(
                    f"No satisfiable goal after {max_tries} tries; the database for '{domain}' looks degenerate"
                )
            candidate = _sample_domain(ontology, domain, rng, config)
            if not ontology.domain(domain).database or db.count(domain, candidate.constraints) > 0:
                goal.domains[domain] = candidate
                break
    logger.debug(f"Sampled goal over {chosen} in {tries} tries")
    return goal
