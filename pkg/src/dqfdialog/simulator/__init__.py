"""Agenda-based user simulator and the episodic dialog environment."""

from .agenda import Agenda
from .environment import MAX_TURNS, DialogEnvironment, EnvConfig, EnvStepResult
from .episode import EpisodeLog, TurnRecord, read_episode_logs, write_episode_logs
from .evaluator import GoalReport, evaluate_goal
from .goal import DomainGoal, GoalConfig, UserGoal, sample_goal
from .user import AgendaUser

__all__ = [
    "Agenda",
    "AgendaUser",
    "MAX_TURNS",
    "DialogEnvironment",
    "EnvConfig",
    "EnvStepResult",
    "EpisodeLog",
    "TurnRecord",
    "read_episode_logs",
    "write_episode_logs",
    "GoalReport",
    "evaluate_goal",
    "DomainGoal",
    "GoalConfig",
    "UserGoal",
    "sample_goal",
]
