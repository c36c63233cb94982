"""
dqfdialog: deep Q-learning from demonstrations for task-oriented dialog policies.

This package trains a dialog manager against an agenda-based simulated user
in dialog-act space, bootstrapping it from a rule-based or weak expert.
"""

__version__ = "0.1.0"

from .agent import AgentConfig, DQfDAgent, NetworkConfig, TrainingMode, train
from .api import collect_demonstrations, compare_policies, evaluate_checkpoint, train_seed
from .evaluation import MetricsReport, run_episodes
from .runconfig import RunConfig
from .simulator import DialogEnvironment, EnvConfig

__all__ = [
    "AgentConfig",
    "DQfDAgent",
    "NetworkConfig",
    "TrainingMode",
    "train",
    "collect_demonstrations",
    "compare_policies",
    "evaluate_checkpoint",
    "train_seed",
    "MetricsReport",
    "run_episodes",
    "RunConfig",
    "DialogEnvironment",
    "EnvConfig",
    "__version__",
]
