"""Episodic dialog environment with the reset/step contract."""

import logging
from dataclasses import dataclass, field
from typing import List, Optional, Tuple, Union

import numpy as np

from ..dialog.actions import ActionSpace, enumerate_actions
from ..dialog.database import EntityDatabase
from ..dialog.models import DialogAct, DialogState, Intent, Ontology
from ..dialog.tracker import apply_system_acts, initial_state, mark_booked, track_state
from ..errors import ContractViolation
from .episode import SYSTEM, USER, EpisodeLog, TurnRecord
from .goal import GoalConfig, UserGoal, sample_goal
from .user import ACTS_PER_TURN, AgendaUser

logger = logging.getLogger(__name__)

MAX_TURNS = 40


@dataclass
class EnvConfig:
    """Simulator parameters; rewards are derived from ``max_turns``."""
    max_turns: int = MAX_TURNS
    acts_per_turn: int = ACTS_PER_TURN
    turn_penalty: float = 1.0
    min_domains: int = 1
    max_domains: int = 3
    dontcare_probability: float = 0.1
    booking_probability: float = 0.5

    def __post_init__(self):
        """Validate configuration values."""
        if self.max_turns < 1:
            raise ValueError(f"max_turns must be positive, got {self.max_turns}")
        if self.acts_per_turn < 1:
            raise ValueError(f"acts_per_turn must be positive, got {self.acts_per_turn}")
        if self.turn_penalty < 0:
            raise ValueError(f"turn_penalty must be non-negative, got {self.turn_penalty}")
        self.goal_config()

    @property
    def success_reward(self) -> float:
        return 2.0 * self.max_turns

    @property
    def failure_reward(self) -> float:
        return -float(self.max_turns)

    def goal_config(self) -> GoalConfig:
        return GoalConfig(
            min_domains=self.min_domains,
            max_domains=self.max_domains,
            dontcare_probability=self.dontcare_probability,
            booking_probability=self.booking_probability,
        )


@dataclass
class EnvStepResult:
    """Outcome of one system action; ``success`` is set only when done."""
    user_acts: List[DialogAct]
    reward: float
    done: bool
    success: Optional[bool] = None
    feedback: dict = field(default_factory=dict)


class DialogEnvironment:
    """
    Simulated-user environment in dialog-act space.

    Each ``step`` is one frame: the system action is realized and applied,
    the user reacts, and the tracker folds the user turn into the state.

    Args:
        ontology: Validated ontology
        db: Entity database
        config: Simulator parameters
        seed: Root seed for goal sampling

    Example:
        >>> env = DialogEnvironment(ontology, db, seed=0)
        >>> user_acts, state = env.reset()
        >>> result = env.step(env.actions.find(TemplateKind.REQ_MORE))
    """

    def __init__(
        self,
        ontology: Ontology,
        db: EntityDatabase,
        config: Optional[EnvConfig] = None,
        seed: Union[int, np.random.SeedSequence, None] = None,
        actions: Optional[ActionSpace] = None,
    ):
        self.ontology = ontology
        self.db = db
        self.config = config or EnvConfig()
        self.actions = actions or enumerate_actions(ontology)
        self.rng = np.random.default_rng(seed)
        self.user: Optional[AgendaUser] = None
        self.state: Optional[DialogState] = None
        self.log: Optional[EpisodeLog] = None
        self.done = True
        self.success: Optional[bool] = None

    @property
    def goal(self) -> UserGoal:
        if self.user is None:
            raise ContractViolation("No episode has been started; call reset() first")
        return self.user.goal

    def reset(self, seed: Optional[int] = None, goal: Optional[UserGoal] = None) -> Tuple[List[DialogAct], DialogState]:
        """
        Start a new episode.

        Args:
            seed: Reseeds the environment before sampling, if given
            goal: Use this goal instead of sampling one

        Returns:
            The opening user acts and the state after tracking them
        """
        if seed is not None:
            self.rng = np.random.default_rng(seed)
        if goal is None:
            goal = sample_goal(self.ontology, self.db, self.rng, self.config.goal_config())
        self.user = AgendaUser(goal, self.db, self.config.acts_per_turn)
        self.log = EpisodeLog(goal=UserGoal.from_dict(goal.to_dict()), seed=seed)
        self.done = False
        self.success = None

        user_acts = self.user.start()
        self.state = track_state(initial_state(self.ontology, self.db), user_acts, self.db)
        self.log.append(TurnRecord(turn=0, actor=USER, acts=user_acts))
        logger.debug(f"Episode start: {[str(a) for a in user_acts]}")
        return user_acts, self.state

    def step(self, action: int) -> EnvStepResult:
        """
        Execute one system action.

        Args:
            action: Index into the action space

        Returns:
            EnvStepResult for this frame

        Raises:
            ContractViolation: If the episode is finished or was never started
            IndexError: If the action index is out of range
        """
        if self.done or self.state is None or self.user is None:
            raise ContractViolation("step() called on a finished episode; call reset() first")
        if not 0 <= action < len(self.actions):
            raise IndexError(f"Action {action} outside the action space of size {len(self.actions)}")

        system_acts = self.actions.realize(action, self.state, self.db)
        self.state = apply_system_acts(self.state, system_acts)
        turn = self.state.turn
        self.log.append(TurnRecord(turn=turn, actor=SYSTEM, acts=system_acts))

        feedback = {}
        user_acts: List[DialogAct] = []
        success: Optional[bool] = None
        if any(act.intent == Intent.BYE for act in system_acts):
            success = self.user.satisfied
        else:
            user_acts, feedback = self.user.respond(system_acts, self.state)
            for key, accepted in feedback.items():
                if accepted and key.startswith("book:"):
                    mark_booked(self.state, self.ontology, key[len("book:"):])
            self.state = track_state(self.state, user_acts, self.db)
            if any(act.intent == Intent.BYE for act in user_acts):
                success = self.user.satisfied
            elif turn >= self.config.max_turns:
                success = False

        reward = -self.config.turn_penalty
        done = success is not None
        if done:
            reward += self.config.success_reward if success else self.config.failure_reward
            self.done = True
            self.success = success
            self.state.terminated = True

        self.log.records[-1].reward = reward
        self.log.append(TurnRecord(turn=turn, actor=USER, acts=user_acts, feedback=feedback))
        return EnvStepResult(user_acts=user_acts, reward=reward, done=done, success=success, feedback=feedback)
