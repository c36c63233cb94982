"""Agenda-based simulated user."""

import logging
from typing import Dict, List, Set, Tuple

from ..dialog.database import EntityDatabase
from ..dialog.models import DONTCARE, DialogAct, DialogState, Intent
from .agenda import Agenda
from .goal import UserGoal

logger = logging.getLogger(__name__)

ACTS_PER_TURN = 3


class AgendaUser:
    """
    Simulated user driven by a goal and an agenda of pending acts.

    The user tracks which of its requests were answered correctly and which
    bookings were completed; the goal is satisfied when every request is
    answered and every wanted booking is done.

    Args:
        goal: The user's goal; constraints may be relaxed during the dialog
        db: Entity database, used to judge system Informs against the truth
        acts_per_turn: Maximum acts popped per user turn
    """

    def __init__(self, goal: UserGoal, db: EntityDatabase, acts_per_turn: int = ACTS_PER_TURN):
        self.goal = goal
        self.db = db
        self.acts_per_turn = acts_per_turn
        self.agenda = Agenda.from_goal(goal)
        self.answered: Set[Tuple[str, str]] = set()
        self.booked: Set[str] = set()
        self.informed: Dict[str, List[str]] = {d: [] for d in goal.domains}

    @property
    def satisfied(self) -> bool:
        return all(k in self.answered for k in self.goal.request_slots) and all(
            d in self.booked for d in self.goal.wanted_bookings
        )

    def start(self) -> List[DialogAct]:
        """Open the dialog with the first acts of the agenda."""
        return self._pop()

    def respond(self, system_acts: List[DialogAct], state: DialogState) -> Tuple[List[DialogAct], Dict[str, bool]]:
        """
        React to a system turn and produce the next user turn.

        Args:
            system_acts: Realized system acts
            state: Dialog state after the system acts were applied

        Returns:
            The user's acts and its judgements of the system turn
        """
        feedback: Dict[str, bool] = {}
        for act in system_acts:
            if act.domain not in self.goal:
                if act.intent == Intent.INFORM:
                    feedback[f"inform:{act.domain}.{act.slot}"] = False
                elif act.intent == Intent.BOOK:
                    feedback[f"book:{act.domain}"] = False
                continue
            handler = getattr(self, f"_on_{act.intent.value}", None)
            if handler is not None:
                handler(act, state, feedback)
        return self._pop(), feedback

    def _on_request(self, act: DialogAct, state: DialogState, feedback: Dict[str, bool]) -> None:
        target = self.goal[act.domain]
        value = target.constraints.get(act.slot) or target.booking.get(act.slot) or DONTCARE
        self._push_inform(act.domain, act.slot, value)

    def _on_inform(self, act: DialogAct, state: DialogState, feedback: Dict[str, bool]) -> None:
        key = (act.domain, act.slot)
        target = self.goal[act.domain]
        if act.slot not in target.requests:
            feedback[f"inform:{act.domain}.{act.slot}"] = False
            return
        entity = self._offered(act.domain, state)
        correct = entity is not None and target.matches(entity) and entity.get(act.slot) == act.value
        feedback[f"inform:{act.domain}.{act.slot}"] = correct
        if correct:
            self.answered.add(key)
            self.agenda.remove(DialogAct(Intent.REQUEST, act.domain, act.slot))
            return
        self.answered.discard(key)
        self.agenda.push(DialogAct(Intent.REQUEST, act.domain, act.slot))
        violated = target.first_violation(entity) if entity is not None else None
        if violated is not None:
            self._push_inform(act.domain, violated, target.constraints[violated])

    def _on_offerbooking(self, act: DialogAct, state: DialogState, feedback: Dict[str, bool]) -> None:
        target = self.goal[act.domain]
        if target.wants_booking and act.domain not in self.booked:
            for slot, value in reversed(list(target.booking.items())):
                self._push_inform(act.domain, slot, value)

    def _on_book(self, act: DialogAct, state: DialogState, feedback: Dict[str, bool]) -> None:
        domain = act.domain
        target = self.goal[domain]
        if not target.wants_booking:
            feedback[f"book:{domain}"] = False
            return

        tracked = state[domain]
        missing = [(s, v) for s, v in target.booking.items() if tracked.constraints.get(s) != v]
        database = self.db.ontology.domain(domain).database
        entity = self._offered(domain, state) if database else None
        if database and entity is None:
            # Nothing on offer yet: state every constraint, dontcare included.
            missing += [(s, v) for s, v in target.constraints.items() if tracked.constraints.get(s) != v]
        elif database:
            violated = target.first_violation(entity)
            if violated is not None:
                missing.append((violated, target.constraints[violated]))
        else:
            missing += [
                (s, v) for s, v in target.constraints.items()
                if v != DONTCARE and tracked.constraints.get(s) != v
            ]

        accepted = not missing and (entity is not None or not database)
        feedback[f"book:{domain}"] = accepted
        if accepted:
            self.booked.add(domain)
            return
        for slot, value in reversed(missing):
            self._push_inform(domain, slot, value)

    def _on_nooffer(self, act: DialogAct, state: DialogState, feedback: Dict[str, bool]) -> None:
        domain = act.domain
        if state[domain].db_count != 0:
            return
        target = self.goal[domain]
        for slot in reversed(self.informed[domain]):
            if slot in target.constraints and target.constraints[slot] != DONTCARE:
                target.constraints[slot] = DONTCARE
                logger.debug(f"User relaxes {domain}.{slot} after NoOffer")
                self._push_inform(domain, slot, DONTCARE)
                return

    def _offered(self, domain: str, state: DialogState):
        name = state[domain].offered_entity
        return None if name is None else self.db.entity(domain, name)

    def _push_inform(self, domain: str, slot: str, value: str) -> None:
        self.agenda.push(DialogAct(Intent.INFORM, domain, slot, value))

    def _repush_pending(self) -> None:
        """Put unanswered requests and unfinished bookings back on the agenda."""
        for domain, target in reversed(list(self.goal.domains.items())):
            if target.wants_booking and domain not in self.booked:
                for slot, value in reversed(list(target.booking.items())):
                    self._push_inform(domain, slot, value)
            for slot in reversed(target.requests):
                if (domain, slot) not in self.answered:
                    self.agenda.push(DialogAct(Intent.REQUEST, domain, slot))

    def _pop(self) -> List[DialogAct]:
        acts = self.agenda.pop(self.acts_per_turn)
        if not acts:
            if self.satisfied:
                return [DialogAct(Intent.BYE)]
            self._repush_pending()
            acts = self.agenda.pop(self.acts_per_turn)
        elif not self.agenda and self.satisfied and len(acts) < self.acts_per_turn:
            acts.append(DialogAct(Intent.BYE))
        for act in acts:
            if act.intent == Intent.INFORM and act.domain in self.informed:
                order = self.informed[act.domain]
                if act.slot in order:
                    order.remove(act.slot)
                order.append(act.slot)
        return acts
