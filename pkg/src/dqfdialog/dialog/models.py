"""Data models for the dialog-act world: ontology, acts and tracked state."""

import copy
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List, Optional

from ..errors import DuplicateDomain, DuplicateSlot, EmptyValueList, OntologyError, UnknownDomain

GENERAL = "general"
DONTCARE = "dontcare"


class Intent(Enum):
    """Dialog act intents, in featurization order."""
    INFORM = "inform"
    REQUEST = "request"
    OFFER_BOOKING = "offerbooking"
    BOOK = "book"
    NO_OFFER = "nooffer"
    GREET = "greet"
    BYE = "bye"
    REQ_MORE = "reqmore"


DOMAIN_ONLY_INTENTS = (Intent.OFFER_BOOKING, Intent.BOOK, Intent.NO_OFFER)
GENERAL_INTENTS = (Intent.GREET, Intent.BYE, Intent.REQ_MORE)


@dataclass(frozen=True)
class DialogAct:
    """
    One unit of conversational meaning exchanged between system and user.

    Example:
        >>> DialogAct(Intent.INFORM, "hotel", "area", "north")
        DialogAct(intent=<Intent.INFORM: 'inform'>, domain='hotel', slot='area', value='north')
    """
    intent: Intent
    domain: str = GENERAL
    slot: Optional[str] = None
    value: Optional[str] = None

    def __post_init__(self):
        """Validate the act's shape for its intent."""
        if self.intent == Intent.INFORM:
            if self.slot is None or self.value is None:
                raise ValueError(f"Inform act needs slot and value, got {self}")
        elif self.intent == Intent.REQUEST:
            if self.slot is None or self.value is not None:
                raise ValueError(f"Request act needs a slot and no value, got {self}")
        elif self.slot is not None or self.value is not None:
            raise ValueError(f"{self.intent.value} act carries a domain only, got {self}")
        if self.intent in DOMAIN_ONLY_INTENTS and self.domain == GENERAL:
            raise ValueError(f"{self.intent.value} act needs a concrete domain")

    @property
    def key(self) -> tuple:
        """Identity of the act ignoring its value."""
        return (self.intent, self.domain, self.slot)

    def to_dict(self) -> Dict[str, Any]:
        return {"intent": self.intent.value, "domain": self.domain, "slot": self.slot, "value": self.value}

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "DialogAct":
        return cls(Intent(data["intent"]), data["domain"], data.get("slot"), data.get("value"))

    def __str__(self) -> str:
        name = self.intent.value.capitalize()
        if self.slot is None:
            return f"{name}({self.domain})"
        if self.value is None:
            return f"{name}({self.domain}, {self.slot})"
        return f"{name}({self.domain}, {self.slot}={self.value})"


@dataclass
class DomainSpec:
    """Slots and capabilities of one domain."""
    name: str
    informable: Dict[str, List[str]] = field(default_factory=dict)
    requestable: List[str] = field(default_factory=list)
    bookable: bool = False
    booking: Dict[str, List[str]] = field(default_factory=dict)
    database: bool = True

    def __post_init__(self):
        """Validate slot names and value lists."""
        seen = set()
        for slot in list(self.informable) + list(self.requestable) + list(self.booking):
            if slot in seen:
                raise DuplicateSlot(f"Slot '{slot}' declared twice in domain '{self.name}'")
            seen.add(slot)
        for slot, values in list(self.informable.items()) + list(self.booking.items()):
            if not values:
                raise EmptyValueList(f"Slot '{self.name}.{slot}' has an empty value list")
            if len(set(values)) != len(values):
                raise OntologyError(f"Slot '{self.name}.{slot}' repeats a value")
            if DONTCARE in values:
                raise OntologyError(f"'{DONTCARE}' is reserved, found in '{self.name}.{slot}'")
        if self.booking and not self.bookable:
            raise OntologyError(f"Domain '{self.name}' declares booking slots but is not bookable")

    @property
    def constraint_slots(self) -> List[str]:
        """Informable slots followed by booking slots."""
        return list(self.informable) + list(self.booking)

    def values(self, slot: str) -> List[str]:
        """Values accepted for a constraint slot (informables also accept dontcare)."""
        if slot in self.informable:
            return self.informable[slot] + [DONTCARE]
        return list(self.booking[slot])

    def has_slot(self, slot: str) -> bool:
        return slot in self.informable or slot in self.requestable or slot in self.booking


@dataclass
class Ontology:
    """The set of domains a dialog system can talk about."""
    domains: List[DomainSpec] = field(default_factory=list)

    def __post_init__(self):
        """Check domain names are unique."""
        names = set()
        for spec in self.domains:
            if spec.name == GENERAL:
                raise OntologyError(f"'{GENERAL}' is a reserved domain name")
            if spec.name in names:
                raise DuplicateDomain(f"Duplicate domain '{spec.name}'")
            names.add(spec.name)

    @property
    def domain_names(self) -> List[str]:
        return [spec.name for spec in self.domains]

    @property
    def database_domains(self) -> List[str]:
        return [spec.name for spec in self.domains if spec.database]

    def domain(self, name: str) -> DomainSpec:
        """
        Look up a domain by name.

        Raises:
            UnknownDomain: If no domain has that name
        """
        for spec in self.domains:
            if spec.name == name:
                return spec
        raise UnknownDomain(f"Unknown domain '{name}'")

    def __contains__(self, name: str) -> bool:
        return any(spec.name == name for spec in self.domains)


@dataclass
class DomainState:
    """Tracked information for a single domain."""
    constraints: Dict[str, str] = field(default_factory=dict)
    requested: List[str] = field(default_factory=list)
    db_count: int = 0
    offered_entity: Optional[str] = None
    booked: bool = False

    @property
    def active(self) -> bool:
        return bool(self.constraints or self.requested)


@dataclass
class DialogState:
    """
    Everything the system knows about the conversation so far.

    ``ignored_acts`` counts user acts the tracker had to drop because they
    referenced unknown domains, slots or values.
    """
    domains: Dict[str, DomainState] = field(default_factory=dict)
    turn: int = 0
    last_user_acts: List[DialogAct] = field(default_factory=list)
    terminated: bool = False
    ignored_acts: int = 0

    @classmethod
    def empty(cls, ontology: Ontology) -> "DialogState":
        return cls(domains={name: DomainState() for name in ontology.domain_names})

    def __getitem__(self, domain: str) -> DomainState:
        return self.domains[domain]

    def copy(self) -> "DialogState":
        return copy.deepcopy(self)

    def user_said(self, intent: Intent) -> bool:
        return any(act.intent == intent for act in self.last_user_acts)
