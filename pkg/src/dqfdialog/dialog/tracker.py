"""Rule-based dialog state tracking from dialog acts."""

import logging
from typing import Iterable, List

from ..errors import DQfDError
from .database import EntityDatabase
from .models import DONTCARE, DialogAct, DialogState, Intent, Ontology

logger = logging.getLogger(__name__)


def initial_state(ontology: Ontology, db: EntityDatabase) -> DialogState:
    """Fresh state with database counts for unconstrained domains."""
    state = DialogState.empty(ontology)
    for domain in ontology.database_domains:
        _refresh(state, domain, db)
    return state


def _refresh(state: DialogState, domain: str, db: EntityDatabase) -> None:
    """Re-query the database for a domain and update count and offer."""
    spec = db.ontology.domain(domain)
    tracked = state[domain]
    tracked.booked = False
    if not spec.database:
        return
    informable = {s: v for s, v in tracked.constraints.items() if s in spec.informable}
    matches = db.query(domain, informable)
    tracked.db_count = len(matches)
    tracked.offered_entity = matches[0]["name"] if informable and matches else None


def _accepts(ontology: Ontology, act: DialogAct) -> bool:
    """Whether an act refers to a known domain, slot and value."""
    if act.domain not in ontology:
        return False
    spec = ontology.domain(act.domain)
    if act.intent == Intent.INFORM:
        if act.slot in spec.informable:
            return act.value in spec.informable[act.slot] or act.value == DONTCARE
        return act.slot in spec.booking and act.value in spec.booking[act.slot]
    if act.intent == Intent.REQUEST:
        return act.slot in spec.requestable
    return True


def track_state(state: DialogState, user_acts: Iterable[DialogAct], db: EntityDatabase) -> DialogState:
    """
    Apply one user turn to the dialog state.

    Inform acts overwrite constraints, Request acts add to the requested
    slots, Bye terminates. Domains whose constraints changed get their
    database summary refreshed. Acts with unknown domains, slots or values
    are skipped and counted in ``ignored_acts``.

    Args:
        state: State before the user turn (not modified)
        user_acts: Acts of the user turn, applied in order
        db: Entity database for count refreshes

    Returns:
        The updated state
    """
    new_state = state.copy()
    user_acts = list(user_acts)
    changed: List[str] = []

    for act in user_acts:
        if act.intent == Intent.BYE:
            new_state.terminated = True
            continue
        if act.intent not in (Intent.INFORM, Intent.REQUEST):
            continue
        if not _accepts(db.ontology, act):
            new_state.ignored_acts += 1
            logger.debug(f"Ignoring act with unknown domain/slot/value: {act}")
            continue
        tracked = new_state[act.domain]
        if act.intent == Intent.INFORM:
            if tracked.constraints.get(act.slot) != act.value:
                tracked.constraints[act.slot] = act.value
                if act.domain not in changed:
                    changed.append(act.domain)
        elif act.slot not in tracked.requested:
            tracked.requested.append(act.slot)

    for domain in changed:
        _refresh(new_state, domain, db)

    new_state.last_user_acts = user_acts
    return new_state


def apply_system_acts(state: DialogState, system_acts: Iterable[DialogAct]) -> DialogState:
    """
    Apply one system turn: advance the turn counter and clear answered requests.

    Args:
        state: State before the system turn (not modified)
        system_acts: Realized acts of the chosen system action

    Returns:
        The updated state
    """
    new_state = state.copy()
    new_state.turn += 1
    for act in system_acts:
        if act.intent == Intent.INFORM and act.domain in new_state.domains:
            requested = new_state[act.domain].requested
            if act.slot in requested:
                requested.remove(act.slot)
    return new_state


def mark_booked(state: DialogState, ontology: Ontology, domain: str) -> None:
    """
    Record an accepted booking in place.

    Raises:
        DQfDError: If a database-backed domain has no offered entity
    """
    if ontology.domain(domain).database and state[domain].offered_entity is None:
        raise DQfDError(f"Cannot book '{domain}' without an offered entity")
    state[domain].booked = True
