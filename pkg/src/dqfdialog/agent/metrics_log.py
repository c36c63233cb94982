"""Per-episode training log as append-only delimited text."""

import csv
from dataclasses import dataclass
from pathlib import Path
from typing import List, Optional, Union

HEADER = ("frame", "episode", "phase", "return", "turns", "success", "epsilon", "loss")

PRETRAIN = "pretrain"
TRAIN = "train"


@dataclass
class EpisodeStats:
    """One finished episode on the training frame axis."""
    frame: int
    episode: int
    phase: str
    return_: float
    turns: int
    success: bool
    epsilon: float
    loss: Optional[float] = None

    def row(self) -> List[str]:
        return [
            str(self.frame),
            str(self.episode),
            self.phase,
            repr(float(self.return_)),
            str(self.turns),
            "1" if self.success else "0",
            repr(float(self.epsilon)),
            "" if self.loss is None else repr(float(self.loss)),
        ]


class MetricsLog:
    """
    Collects episode stats and mirrors them to a CSV file when given a path.

    Args:
        path: CSV file to append to; created with a header row
    """

    def __init__(self, path: Union[str, Path, None] = None):
        self.path = Path(path) if path is not None else None
        self.episodes: List[EpisodeStats] = []
        if self.path is not None and not self.path.exists():
            with open(self.path, "w", newline="", encoding="utf-8") as stream:
                csv.writer(stream).writerow(HEADER)

    def append(self, stats: EpisodeStats) -> None:
        self.episodes.append(stats)
        if self.path is not None:
            with open(self.path, "a", newline="", encoding="utf-8") as stream:
                csv.writer(stream).writerow(stats.row())

    def __len__(self) -> int:
        return len(self.episodes)

    def phase(self, name: str) -> List[EpisodeStats]:
        return [e for e in self.episodes if e.phase == name]


def read_metrics_log(path: Union[str, Path]) -> List[EpisodeStats]:
    """Parse a CSV written by MetricsLog."""
    episodes = []
    with open(path, "r", newline="", encoding="utf-8") as stream:
        for row in csv.DictReader(stream):
            episodes.append(EpisodeStats(
                frame=int(row["frame"]),
                episode=int(row["episode"]),
                phase=row["phase"],
                return_=float(row["return"]),
                turns=int(row["turns"]),
                success=row["success"] == "1",
                epsilon=float(row["epsilon"]),
                loss=float(row["loss"]) if row["loss"] else None,
            ))
    return episodes
