"""Run frozen policies against the simulator and aggregate dialog metrics."""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Union

import numpy as np

from ..policy.base import Policy
from ..simulator.environment import DialogEnvironment
from ..simulator.evaluator import GoalReport, evaluate_goal

logger = logging.getLogger(__name__)

PolicyFactory = Callable[[int], Policy]
EnvFactory = Callable[[], DialogEnvironment]


@dataclass
class EpisodeResult:
    """One evaluated episode."""
    seed: int
    turns: int
    total_return: float
    report: GoalReport

    def row(self) -> Dict[str, Any]:
        r = self.report
        return {
            "seed": self.seed,
            "turns": self.turns,
            "return": self.total_return,
            "success": int(r.success),
            "precision": r.slot_precision,
            "recall": r.slot_recall,
            "f1": r.slot_f1,
            "book_rate": "" if r.booked_fraction is None else r.booked_fraction,
        }


@dataclass
class MetricsReport:
    """
    Episode-averaged metrics; rates are percentages.

    The running sums are kept so two reports merge into exactly the report
    of the concatenated episode sets. Book rate averages over the episodes
    whose goal wants a booking.
    """
    episodes: int = 0
    turns_sum: float = 0.0
    return_sum: float = 0.0
    precision_sum: float = 0.0
    recall_sum: float = 0.0
    f1_sum: float = 0.0
    successes: int = 0
    booking_episodes: int = 0
    book_sum: float = 0.0
    rows: List[EpisodeResult] = field(default_factory=list, compare=False, repr=False)

    @classmethod
    def from_results(cls, results: List[EpisodeResult]) -> "MetricsReport":
        report = cls()
        for result in results:
            report.add(result)
        return report

    def add(self, result: EpisodeResult) -> None:
        r = result.report
        self.episodes += 1
        self.turns_sum += result.turns
        self.return_sum += result.total_return
        self.precision_sum += r.slot_precision
        self.recall_sum += r.slot_recall
        self.f1_sum += r.slot_f1
        self.successes += int(r.success)
        if r.booked_fraction is not None:
            self.booking_episodes += 1
            self.book_sum += r.booked_fraction
        self.rows.append(result)

    def merge(self, other: "MetricsReport") -> "MetricsReport":
        return MetricsReport(
            episodes=self.episodes + other.episodes,
            turns_sum=self.turns_sum + other.turns_sum,
            return_sum=self.return_sum + other.return_sum,
            precision_sum=self.precision_sum + other.precision_sum,
            recall_sum=self.recall_sum + other.recall_sum,
            f1_sum=self.f1_sum + other.f1_sum,
            successes=self.successes + other.successes,
            booking_episodes=self.booking_episodes + other.booking_episodes,
            book_sum=self.book_sum + other.book_sum,
            rows=self.rows + other.rows,
        )

    def _mean(self, total: float) -> float:
        return total / self.episodes if self.episodes else 0.0

    @property
    def avg_turns(self) -> float:
        return self._mean(self.turns_sum)

    @property
    def avg_return(self) -> float:
        return self._mean(self.return_sum)

    @property
    def precision(self) -> float:
        return self._mean(self.precision_sum)

    @property
    def recall(self) -> float:
        return self._mean(self.recall_sum)

    @property
    def f1(self) -> float:
        return self._mean(self.f1_sum)

    @property
    def success_rate(self) -> float:
        return 100.0 * self._mean(self.successes)

    @property
    def book_rate(self) -> Optional[float]:
        if not self.booking_episodes:
            return None
        return 100.0 * self.book_sum / self.booking_episodes

    def summary(self) -> Dict[str, Any]:
        """Machine-readable summary of the averaged metrics."""
        return {
            "episodes": self.episodes,
            "avg_turns": self.avg_turns,
            "avg_return": self.avg_return,
            "precision": self.precision,
            "recall": self.recall,
            "f1": self.f1,
            "success_rate": self.success_rate,
            "book_rate": self.book_rate,
        }


def episode_seeds(seed: int, n: int) -> List[int]:
    """Independent per-episode seeds derived from one root seed."""
    return [int(s) for s in np.random.SeedSequence(seed).generate_state(n, dtype=np.uint32)]


def run_episode(policy: Policy, env: DialogEnvironment, seed: int) -> EpisodeResult:
    """Play one episode greedily and evaluate it against its goal."""
    policy.init_session()
    _, state = env.reset(seed=seed)
    total = 0.0
    turns = 0
    while True:
        result = env.step(policy.act(state))
        state = env.state
        total += result.reward
        turns += 1
        if result.done:
            break
    return EpisodeResult(seed=seed, turns=turns, total_return=total, report=evaluate_goal(env.log.goal, env.log))


def run_episodes(
    policy: Union[Policy, PolicyFactory],
    env_factory: EnvFactory,
    n: int,
    seed: int,
    workers: int = 1,
) -> MetricsReport:
    """
    Evaluate a policy over ``n`` seeded episodes.

    Each episode gets its own environment and seed; with a factory, also its
    own policy built from the episode seed, which keeps stochastic policies
    reproducible under ``workers > 1``. A plain Policy instance is shared
    across episodes and should only be combined with ``workers=1`` unless it
    is stateless.

    Args:
        policy: Policy, or factory mapping an episode seed to a Policy
        env_factory: Builds a fresh environment
        n: Number of episodes
        seed: Root seed
        workers: Thread pool size

    Returns:
        MetricsReport with per-episode rows in seed order

    Raises:
        ValueError: If n < 1
    """
    if n < 1:
        raise ValueError(f"Need at least one episode, got n={n}")
    if isinstance(policy, Policy):
        shared = policy

        def make_policy(_: int) -> Policy:
            return shared
    else:
        make_policy = policy
    seeds = episode_seeds(seed, n)

    def one(episode_seed: int) -> EpisodeResult:
        return run_episode(make_policy(episode_seed), env_factory(), episode_seed)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(one, seeds))
    else:
        results = [one(s) for s in seeds]

    report = MetricsReport.from_results(results)
    logger.info(
        f"Evaluated {n} episodes: success={report.success_rate:.1f}% "
        f"return={report.avg_return:.2f} turns={report.avg_turns:.2f}"
    )
    return report
