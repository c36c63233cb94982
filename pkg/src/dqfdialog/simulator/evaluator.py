"""Per-episode goal evaluation from an episode log."""

from dataclasses import dataclass
from typing import Dict, Optional

from .episode import USER, EpisodeLog
from .goal import UserGoal


@dataclass
class GoalReport:
    """
    Outcome of one episode against its goal.

    ``booked_fraction`` is None when the goal wants no booking.
    """
    success: bool
    booked_fraction: Optional[float]
    slot_precision: float
    slot_recall: float
    slot_f1: float
    informed: int = 0
    correct: int = 0
    requested: int = 0
    bookings_wanted: int = 0
    bookings_done: int = 0


def _f1(precision: float, recall: float) -> float:
    if precision + recall == 0:
        return 0.0
    return 2 * precision * recall / (precision + recall)


def evaluate_goal(goal: UserGoal, episode_log: EpisodeLog) -> GoalReport:
    """
    Score an episode from the user's recorded judgements.

    The last judgement of each informed (domain, slot) wins; a booking
    counts as completed once the user accepted it. A goal without requests
    has recall 1, and precision 1 as long as nothing was informed.

    Args:
        goal: The goal the user pursued
        episode_log: Completed episode log

    Returns:
        GoalReport with slot precision, recall, F1, book fraction and success
    """
    informs: Dict[str, bool] = {}
    booked = set()
    for record in episode_log.records:
        if record.actor != USER:
            continue
        for key, value in record.feedback.items():
            kind, _, target = key.partition(":")
            if kind == "inform":
                informs[target] = value
            elif kind == "book" and value:
                booked.add(target)

    requested = [f"{d}.{s}" for d, s in goal.request_slots]
    correct = sum(1 for k in requested if informs.get(k, False))
    if informs:
        precision = correct / len(informs)
    else:
        precision = 0.0 if requested else 1.0
    recall = correct / len(requested) if requested else 1.0

    wanted = goal.wanted_bookings
    done = sum(1 for d in wanted if d in booked)
    booked_fraction = done / len(wanted) if wanted else None

    return GoalReport(
        success=correct == len(requested) and done == len(wanted),
        booked_fraction=booked_fraction,
        slot_precision=precision,
        slot_recall=recall,
        slot_f1=_f1(precision, recall),
        informed=len(informs),
        correct=correct,
        requested=len(requested),
        bookings_wanted=len(wanted),
        bookings_done=done,
    )
