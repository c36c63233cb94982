"""Choose the weak expert's error rate by sweeping its success rate."""

import logging
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

from ..dialog.actions import enumerate_actions
from ..dialog.database import EntityDatabase
from ..dialog.models import Ontology
from ..policy.experts import WeakExpertPolicy
from ..simulator.environment import DialogEnvironment, EnvConfig
from .metrics import run_episodes

logger = logging.getLogger(__name__)

ERROR_RATE_GRID = (0.1, 0.2, 0.3, 0.4, 0.5)
TARGET_SUCCESS_RATE = 61.0
ACCEPTABLE_BAND = (50.0, 70.0)


@dataclass
class CalibrationResult:
    """Chosen error rate plus the full sweep as (error_rate, success_rate) pairs."""
    error_rate: float
    success_rate: float
    sweep: List[Tuple[float, float]] = field(default_factory=list)

    @property
    def within_band(self) -> bool:
        low, high = ACCEPTABLE_BAND
        return low <= self.success_rate <= high


def calibrate_error_rate(
    ontology: Ontology,
    db: EntityDatabase,
    env_config: Optional[EnvConfig] = None,
    episodes: int = 100,
    seed: int = 0,
    grid: Sequence[float] = ERROR_RATE_GRID,
    target: float = TARGET_SUCCESS_RATE,
    workers: int = 1,
) -> CalibrationResult:
    """
    Evaluate the weak expert at each error rate and keep the one whose
    success rate lands nearest ``target``.

    Every grid point is evaluated on the same seeded episodes. Ties go to
    the smaller error rate.

    Args:
        ontology: Ontology of the dialog world
        db: Entity database
        env_config: Simulator settings
        episodes: Evaluation episodes per grid point
        seed: Root seed shared by all grid points
        grid: Candidate error rates
        target: Desired success rate in percent
        workers: Evaluation threads

    Returns:
        CalibrationResult with the chosen rate

    Raises:
        ValueError: If the grid is empty
    """
    if not grid:
        raise ValueError("Calibration grid must not be empty")
    actions = enumerate_actions(ontology)

    def env_factory() -> DialogEnvironment:
        return DialogEnvironment(ontology, db, env_config, actions=actions)

    sweep = []
    for rate in sorted(grid):
        def policy_factory(episode_seed: int, rate: float = rate) -> WeakExpertPolicy:
            return WeakExpertPolicy(ontology, db, rate, episode_seed, actions)

        report = run_episodes(policy_factory, env_factory, episodes, seed, workers)
        sweep.append((float(rate), report.success_rate))
        logger.info(f"Weak expert error_rate={rate:g}: success={report.success_rate:.1f}%")

    rate, success = min(sweep, key=lambda point: abs(point[1] - target))
    result = CalibrationResult(error_rate=rate, success_rate=success, sweep=sweep)
    if not result.within_band:
        low, high = ACCEPTABLE_BAND
        logger.warning(
            f"Calibrated weak expert success {success:.1f}% is outside {low:g}-{high:g}%; "
            f"consider a finer grid"
        )
    return result
