"""Agent and network configuration with the desk and full presets."""

from dataclasses import dataclass, fields, replace
from enum import Enum
from typing import Any, Dict, Tuple

from ..errors import ConfigError
from ..network.dueling import HIDDEN_SIZE, L2_WEIGHT


class TrainingMode(Enum):
    """What the agent learns from."""
    DQN = "dqn"  # no demonstrations
    DQFD = "dqfd"  # protected demos, pre-training and the margin loss
    PREFILL = "prefill"  # protected demos and pre-training, no margin loss

    @property
    def uses_demos(self) -> bool:
        return self != TrainingMode.DQN

    @property
    def uses_margin(self) -> bool:
        return self == TrainingMode.DQFD


@dataclass
class AgentConfig:
    """Learning-loop hyperparameters. Defaults are the desk preset."""
    gamma: float = 0.9
    epsilon_start: float = 0.1
    epsilon_end: float = 0.01
    epsilon_decay_frames: int = 50_000  # 500k at full scale
    total_frames: int = 250_000  # frames of epsilon-greedy acting; 2.5M at full scale
    train_every: int = 1_000  # frames between training rounds
    batches_per_round: int = 2_000
    batch_size: int = 32
    tau: float = 0.8  # expert margin
    margin_weight: float = 1.0
    pretrain_demo_episodes: int = 500
    pretrain_gradient_steps: int = 5_000
    pretrain_interleaved: bool = False  # also train while the expert acts
    mode: TrainingMode = TrainingMode.DQFD
    checkpoint_every: int = 10_000
    moving_average_window: int = 100  # episodes

    def __post_init__(self):
        """Validate configuration values."""
        if isinstance(self.mode, str):
            try:
                self.mode = TrainingMode(self.mode.lower())
            except ValueError:
                raise ValueError(f"Invalid mode: {self.mode}. Must be 'dqn', 'dqfd' or 'prefill'") from None
        if not 0.0 < self.gamma < 1.0:
            raise ValueError(f"gamma must be in (0, 1), got {self.gamma}")
        if not 0.0 <= self.epsilon_end <= self.epsilon_start <= 1.0:
            raise ValueError(
                f"Need 0 <= epsilon_end <= epsilon_start <= 1, got {self.epsilon_end} and {self.epsilon_start}"
            )
        if self.tau <= 0:
            raise ValueError(f"tau must be positive, got {self.tau}")
        if self.margin_weight < 0:
            raise ValueError(f"margin_weight must be non-negative, got {self.margin_weight}")
        for name in ("train_every", "batch_size", "checkpoint_every", "moving_average_window"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be at least 1, got {getattr(self, name)}")
        for name in ("epsilon_decay_frames", "total_frames", "batches_per_round",
                     "pretrain_demo_episodes", "pretrain_gradient_steps"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be non-negative, got {getattr(self, name)}")


@dataclass
class NetworkConfig:
    """Q-network and optimizer settings."""
    hidden_size: int = HIDDEN_SIZE
    lr: float = 0.01
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    lr_step_frames: int = 50_000  # halve lr this often; 0 disables
    l2_weight: float = L2_WEIGHT
    dtype: str = "float64"

    def __post_init__(self):
        """Validate configuration values."""
        if self.hidden_size < 1:
            raise ValueError(f"hidden_size must be at least 1, got {self.hidden_size}")
        if self.lr <= 0:
            raise ValueError(f"lr must be positive, got {self.lr}")
        if not (0.0 <= self.beta1 < 1.0 and 0.0 < self.beta2 < 1.0):
            raise ValueError(f"beta1 and beta2 must lie in [0, 1), got {self.beta1}, {self.beta2}")
        if self.lr_step_frames < 0:
            raise ValueError(f"lr_step_frames must be non-negative, got {self.lr_step_frames}")
        if self.l2_weight < 0:
            raise ValueError(f"l2_weight must be non-negative, got {self.l2_weight}")
        if self.dtype not in ("float64", "float32"):
            raise ValueError(f"Invalid dtype: {self.dtype}. Must be 'float64' or 'float32'")

    @property
    def betas(self) -> Tuple[float, float]:
        return (self.beta1, self.beta2)


PRESETS: Dict[str, Dict[str, Dict[str, Any]]] = {
    "desk": {
        "agent": {"total_frames": 250_000, "epsilon_decay_frames": 50_000, "checkpoint_every": 10_000},
        "network": {"lr_step_frames": 50_000},
    },
    "full": {
        "agent": {"total_frames": 2_500_000, "epsilon_decay_frames": 500_000, "checkpoint_every": 100_000},
        "network": {"lr_step_frames": 500_000},
    },
}


def preset(name: str) -> Tuple[AgentConfig, NetworkConfig]:
    """
    Configurations for a named scale preset.

    Raises:
        ConfigError: If the preset is unknown
    """
    if name not in PRESETS:
        raise ConfigError(f"Unknown preset '{name}'. Choose from {', '.join(sorted(PRESETS))}")
    values = PRESETS[name]
    return AgentConfig(**values["agent"]), NetworkConfig(**values["network"])


def with_overrides(config, overrides: Dict[str, Any]):
    """
    Copy a config dataclass with fields replaced; unknown names raise ConfigError.
    """
    known = {f.name for f in fields(config)}
    unknown = set(overrides) - known
    if unknown:
        raise ConfigError(f"Unknown {type(config).__name__} field(s): {', '.join(sorted(unknown))}")
    return replace(config, **overrides)
