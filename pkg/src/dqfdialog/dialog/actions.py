"""Enumerated system action space.

Each system action is a template that realizes to dialog acts at execution
time. For an ontology with informable slots I_d and requestable slots R_d
per domain d, the action count is::

    |A| = 3 + sum_d (|I_d| + |R_d| + 2*[bookable_d] + [database_d])

one Request per informable slot, one Inform per requestable slot,
OfferBooking and Book per bookable domain, NoOffer per database-backed
domain, and the general Greet, Bye and ReqMore. Templates are ordered by
(kind, domain, slot) with the kind names below compared as strings.

The shipped desk ontology has 10 hotel + 10 restaurant + 4 taxi + 3 general
= 27 actions. Index 0 is ``book/hotel``, index 3 is ``bye/general``.
"""

from dataclasses import dataclass
from enum import Enum
from typing import Dict, List, Optional

from .database import EntityDatabase
from .models import GENERAL, DialogAct, DialogState, Intent, Ontology

NO_VALUE = "none"


class TemplateKind(Enum):
    """Kinds of system action templates; values are the sort keys."""
    BOOK = "book"
    BYE = "bye"
    GREET = "greet"
    INFORM = "inform"
    NO_OFFER = "nooffer"
    OFFER_BOOKING = "offerbooking"
    REQ_MORE = "reqmore"
    REQUEST = "request"


_INTENTS = {
    TemplateKind.BOOK: Intent.BOOK,
    TemplateKind.BYE: Intent.BYE,
    TemplateKind.GREET: Intent.GREET,
    TemplateKind.NO_OFFER: Intent.NO_OFFER,
    TemplateKind.OFFER_BOOKING: Intent.OFFER_BOOKING,
    TemplateKind.REQ_MORE: Intent.REQ_MORE,
}


@dataclass(frozen=True)
class ActionTemplate:
    """An abstract system action; Inform values are filled at execution."""
    kind: TemplateKind
    domain: str = GENERAL
    slot: Optional[str] = None

    @property
    def sort_key(self) -> tuple:
        return (self.kind.value, self.domain, self.slot or "")

    def realize(self, state: DialogState, db: EntityDatabase) -> List[DialogAct]:
        """
        Resolve the template to concrete dialog acts.

        Inform takes its value from the domain's offered entity, or
        ``none`` when nothing is on offer.
        """
        if self.kind == TemplateKind.REQUEST:
            return [DialogAct(Intent.REQUEST, self.domain, self.slot)]
        if self.kind == TemplateKind.INFORM:
            value = NO_VALUE
            offered = state[self.domain].offered_entity
            if offered is not None:
                entity = db.entity(self.domain, offered)
                if entity is not None:
                    value = entity.get(self.slot, NO_VALUE)
            return [DialogAct(Intent.INFORM, self.domain, self.slot, value)]
        return [DialogAct(_INTENTS[self.kind], self.domain)]

    def __str__(self) -> str:
        parts = [self.kind.value, self.domain] + ([self.slot] if self.slot else [])
        return "/".join(parts)


class ActionSpace:
    """Ordered, index-addressable list of system action templates."""

    def __init__(self, templates: List[ActionTemplate]):
        self.templates = list(templates)
        self._index: Dict[ActionTemplate, int] = {t: i for i, t in enumerate(self.templates)}
        if len(self._index) != len(self.templates):
            raise ValueError("Action templates must be unique")

    def __len__(self) -> int:
        return len(self.templates)

    def __getitem__(self, index: int) -> ActionTemplate:
        return self.templates[index]

    def index(self, template: ActionTemplate) -> int:
        """Index of a template; raises KeyError if absent."""
        return self._index[template]

    def find(self, kind: TemplateKind, domain: str = GENERAL, slot: Optional[str] = None) -> int:
        return self.index(ActionTemplate(kind, domain, slot))

    def realize(self, index: int, state: DialogState, db: EntityDatabase) -> List[DialogAct]:
        return self.templates[index].realize(state, db)


def action_count(ontology: Ontology) -> int:
    """Evaluate the enumeration formula on an ontology."""
    return 3 + sum(
        len(spec.informable) + len(spec.requestable) + 2 * int(spec.bookable) + int(spec.database)
        for spec in ontology.domains
    )


def enumerate_actions(ontology: Ontology) -> ActionSpace:
    """
    Enumerate the system action space of an ontology.

    Args:
        ontology: Validated ontology

    Returns:
        ActionSpace sorted by (kind, domain, slot); size equals action_count()
    """
    templates = [
        ActionTemplate(TemplateKind.GREET),
        ActionTemplate(TemplateKind.BYE),
        ActionTemplate(TemplateKind.REQ_MORE),
    ]
    for spec in ontology.domains:
        templates.extend(ActionTemplate(TemplateKind.REQUEST, spec.name, s) for s in spec.informable)
        templates.extend(ActionTemplate(TemplateKind.INFORM, spec.name, s) for s in spec.requestable)
        if spec.bookable:
            templates.append(ActionTemplate(TemplateKind.OFFER_BOOKING, spec.name))
            templates.append(ActionTemplate(TemplateKind.BOOK, spec.name))
        if spec.database:
            templates.append(ActionTemplate(TemplateKind.NO_OFFER, spec.name))

    space = ActionSpace(sorted(templates, key=lambda t: t.sort_key))
    assert len(space) == action_count(ontology)
    return space
