"""Episode logs: turn records written as JSON lines with a goal header."""

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, TextIO, Union

from ..dialog.models import DialogAct
from ..errors import FormatError
from .goal import UserGoal

SYSTEM = "system"
USER = "user"


@dataclass
class TurnRecord:
    """
    One half-turn of an episode.

    ``feedback`` holds the user's judgements of the preceding system turn:
    ``inform:<domain>.<slot>`` and ``book:<domain>`` mapped to booleans.
    """
    turn: int
    actor: str
    acts: List[DialogAct]
    reward: float = 0.0
    feedback: Dict[str, bool] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "turn": self.turn,
            "actor": self.actor,
            "acts": [act.to_dict() for act in self.acts],
            "reward": self.reward,
            "feedback": dict(self.feedback),
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "TurnRecord":
        return cls(
            turn=int(data["turn"]),
            actor=data["actor"],
            acts=[DialogAct.from_dict(a) for a in data["acts"]],
            reward=float(data.get("reward", 0.0)),
            feedback={k: bool(v) for k, v in data.get("feedback", {}).items()},
        )


@dataclass
class EpisodeLog:
    """Goal plus the ordered turn records of one episode."""
    goal: UserGoal
    records: List[TurnRecord] = field(default_factory=list)
    seed: Optional[int] = None

    def append(self, record: TurnRecord) -> None:
        self.records.append(record)

    @property
    def turns(self) -> int:
        return sum(1 for r in self.records if r.actor == SYSTEM)

    @property
    def total_return(self) -> float:
        return sum(r.reward for r in self.records)

    def write(self, stream: TextIO) -> None:
        """Write the header and records as JSON lines."""
        header = {"type": "goal", "seed": self.seed, "goal": self.goal.to_dict()}
        stream.write(json.dumps(header, sort_keys=True) + "\n")
        for record in self.records:
            stream.write(json.dumps({"type": "turn", **record.to_dict()}, sort_keys=True) + "\n")


def write_episode_logs(logs: List[EpisodeLog], path: Union[str, Path]) -> None:
    with open(path, "a", encoding="utf-8") as stream:
        for log in logs:
            log.write(stream)


def read_episode_logs(path: Union[str, Path]) -> List[EpisodeLog]:
    """
    Read episodes written by ``write_episode_logs``.

    Raises:
        FormatError: On malformed lines or turn records before any goal header
    """
    logs: List[EpisodeLog] = []
    with open(path, "r", encoding="utf-8") as stream:
        for lineno, line in enumerate(stream, start=1):
            if not line.strip():
                continue
            try:
                data = json.loads(line)
                if data["type"] == "goal":
                    logs.append(EpisodeLog(goal=UserGoal.from_dict(data["goal"]), seed=data.get("seed")))
                elif not logs:
                    raise FormatError(f"{path}:{lineno}: turn record before a goal header")
                else:
                    logs[-1].append(TurnRecord.from_dict(data))
            except (KeyError, TypeError, ValueError) as exc:
                if isinstance(exc, FormatError):
                    raise
                raise FormatError(f"{path}:{lineno}: malformed episode record ({exc})") from None
    return logs
