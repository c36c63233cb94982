"""Stack of pending user dialog acts."""

from typing import Iterator, List

from ..dialog.models import DONTCARE, DialogAct, Intent
from .goal import UserGoal


class Agenda:
    """
    Stack-like agenda of pending user acts.

    ``push`` places an act on top; an act with the same (intent, domain,
    slot) already on the agenda is moved rather than duplicated, so the
    agenda never holds more than one act per key. ``pop`` takes from the top.
    """

    def __init__(self):
        self._stack: List[DialogAct] = []

    @classmethod
    def from_goal(cls, goal: UserGoal) -> "Agenda":
        """
        Build the initial agenda so acts pop in this order, per goal domain:
        constraint Informs (dontcare omitted), Requests, booking Informs.
        """
        ordered: List[DialogAct] = []
        for domain, target in goal.domains.items():
            ordered.extend(
                DialogAct(Intent.INFORM, domain, slot, value)
                for slot, value in target.constraints.items()
                if value != DONTCARE
            )
            ordered.extend(DialogAct(Intent.REQUEST, domain, slot) for slot in target.requests)
            ordered.extend(DialogAct(Intent.INFORM, domain, slot, value) for slot, value in target.booking.items())
        agenda = cls()
        for act in reversed(ordered):
            agenda.push(act)
        return agenda

    def push(self, act: DialogAct) -> None:
        self.remove(act)
        self._stack.append(act)

    def remove(self, act: DialogAct) -> bool:
        """Remove the act with the same key, if present."""
        for index, pending in enumerate(self._stack):
            if pending.key == act.key:
                del self._stack[index]
                return True
        return False

    def pop(self, count: int = 1) -> List[DialogAct]:
        acts = []
        while self._stack and len(acts) < count:
            acts.append(self._stack.pop())
        return acts

    def __len__(self) -> int:
        return len(self._stack)

    def __iter__(self) -> Iterator[DialogAct]:
        """Iterate from top to bottom."""
        return iter(reversed(self._stack))

    def __contains__(self, act: DialogAct) -> bool:
        return any(pending.key == act.key for pending in self._stack)
