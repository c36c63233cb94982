"""Rectified Adam with a step-wise learning-rate schedule."""

import math
from dataclasses import dataclass, field
from typing import Dict, Optional

import numpy as np

from ..errors import NonFiniteError
from .dueling import QNetParams

RECTIFY_THRESHOLD = 5.0


@dataclass
class OptState:
    """First and second moments per parameter plus the step counter."""
    m: Dict[str, np.ndarray] = field(default_factory=dict)
    v: Dict[str, np.ndarray] = field(default_factory=dict)
    t: int = 0


class RAdam:
    """
    Rectified adaptive-moment optimizer.

    While the variance of the adaptive learning rate is intractable
    (``rho_t < 5``) the update is plain bias-corrected momentum; after that
    the Adam step is scaled by the rectification term ``r_t``.

    Args:
        lr: Base learning rate
        betas: Decay rates of the first and second moments
        eps: Added to the denominator
        lr_step_frames: Halve the learning rate every this many frames; 0 disables

    Example:
        >>> opt = RAdam(lr=0.01)
        >>> params = opt.step(params, grads, frame=0)
    """

    def __init__(
        self,
        lr: float = 0.01,
        betas: tuple = (0.9, 0.999),
        eps: float = 1e-8,
        lr_step_frames: int = 0,
        state: Optional[OptState] = None,
    ):
        if lr <= 0:
            raise ValueError(f"lr must be positive, got {lr}")
        if not (0.0 <= betas[0] < 1.0 and 0.0 < betas[1] < 1.0):
            raise ValueError(f"betas must lie in [0, 1), got {betas}")
        self.lr = lr
        self.beta1, self.beta2 = betas
        self.eps = eps
        self.lr_step_frames = lr_step_frames
        self.state = state or OptState()
        self.rho_inf = 2.0 / (1.0 - self.beta2) - 1.0

    def learning_rate(self, frame: int = 0) -> float:
        """Scheduled learning rate ``lr * 0.5 ** (frame // lr_step_frames)``."""
        if not self.lr_step_frames:
            return self.lr
        return self.lr * 0.5 ** (frame // self.lr_step_frames)

    def rho(self, t: int) -> float:
        """Length of the approximated simple moving average at step t."""
        beta2_t = self.beta2**t
        return self.rho_inf - 2.0 * t * beta2_t / (1.0 - beta2_t)

    def rectification(self, t: int) -> Optional[float]:
        """The ``r_t`` factor, or None while the momentum-only branch applies."""
        rho_t = self.rho(t)
        if rho_t < RECTIFY_THRESHOLD:
            return None
        rho_inf = self.rho_inf
        return math.sqrt(
            (rho_t - 4.0) * (rho_t - 2.0) * rho_inf / ((rho_inf - 4.0) * (rho_inf - 2.0) * rho_t)
        )

    def step(self, params: QNetParams, grads: QNetParams, frame: int = 0) -> QNetParams:
        """
        Apply one update in place.

        Args:
            params: Weights to update
            grads: Gradients with the same layout
            frame: Current frame, for the learning-rate schedule

        Returns:
            The updated ``params``

        Raises:
            NonFiniteError: If any gradient is NaN or infinite; nothing is changed
        """
        if not grads.all_finite():
            raise NonFiniteError(f"Non-finite gradient at optimizer step {self.state.t + 1}")
        for name, value in params.items():
            grad = getattr(grads, name)
            if grad.shape != value.shape:
                raise ValueError(f"Gradient {name} has shape {grad.shape}, expected {value.shape}")

        state = self.state
        state.t += 1
        t = state.t
        lr = self.learning_rate(frame)
        bias1 = 1.0 - self.beta1**t
        bias2 = 1.0 - self.beta2**t
        rect = self.rectification(t)

        for name, value in params.items():
            grad = getattr(grads, name)
            if name not in state.m:
                state.m[name] = np.zeros_like(value)
                state.v[name] = np.zeros_like(value)
            m, v = state.m[name], state.v[name]
            m *= self.beta1
            m += (1.0 - self.beta1) * grad
            v *= self.beta2
            v += (1.0 - self.beta2) * (grad * grad)

            m_hat = m / bias1
            if rect is None:
                value -= lr * m_hat
            else:
                v_hat = np.sqrt(v / bias2)
                value -= lr * rect * m_hat / (v_hat + self.eps)
        return params


def optimizer_step(opt: RAdam, params: QNetParams, grads: QNetParams, frame: int = 0) -> QNetParams:
    """Functional form of ``RAdam.step``."""
    return opt.step(params, grads, frame)
