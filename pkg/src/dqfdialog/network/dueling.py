"""One-hidden-layer dueling Q-network with explicit forward and backward passes.

Shapes for input length ``n``, hidden size ``h`` and ``k`` actions::

    W1  [h, n]   b1  [h]
    w_v [h]      b_v []      value head
    W_a [k, h]   b_a [k]     advantage head

    h = relu(W1 x + b1)
    q = V + A - mean(A),  V = w_v . h + b_v,  A = W_a h + b_a
"""

from dataclasses import dataclass
from typing import Dict, Iterator, Optional, Tuple

import numpy as np

HIDDEN_SIZE = 100
L2_WEIGHT = 1e-5

PARAM_NAMES = ("W1", "b1", "w_v", "b_v", "W_a", "b_a")


@dataclass
class QNetParams:
    """Weights of the dueling network."""
    W1: np.ndarray
    b1: np.ndarray
    w_v: np.ndarray
    b_v: np.ndarray
    W_a: np.ndarray
    b_a: np.ndarray

    def __post_init__(self):
        """Check the shapes agree with each other."""
        hidden, inputs = self.W1.shape
        actions = self.W_a.shape[0]
        expected = {
            "b1": (hidden,),
            "w_v": (hidden,),
            "b_v": (),
            "W_a": (actions, hidden),
            "b_a": (actions,),
        }
        for name, shape in expected.items():
            if getattr(self, name).shape != shape:
                raise ValueError(f"{name} has shape {getattr(self, name).shape}, expected {shape}")

    @classmethod
    def init(
        cls,
        input_size: int,
        action_count: int,
        hidden_size: int = HIDDEN_SIZE,
        rng: Optional[np.random.Generator] = None,
        dtype=np.float64,
    ) -> "QNetParams":
        """
        Uniform weights in +-1/sqrt(fan_in), zero biases.

        Args:
            input_size: State vector length
            action_count: Size of the action space
            hidden_size: Hidden units
            rng: Seeded generator
            dtype: Float type of every array
        """
        rng = rng if rng is not None else np.random.default_rng()

        def uniform(shape, fan_in):
            bound = 1.0 / np.sqrt(fan_in)
            return rng.uniform(-bound, bound, size=shape).astype(dtype)

        return cls(
            W1=uniform((hidden_size, input_size), input_size),
            b1=np.zeros(hidden_size, dtype=dtype),
            w_v=uniform((hidden_size,), hidden_size),
            b_v=np.zeros((), dtype=dtype),
            W_a=uniform((action_count, hidden_size), hidden_size),
            b_a=np.zeros(action_count, dtype=dtype),
        )

    @property
    def input_size(self) -> int:
        return self.W1.shape[1]

    @property
    def hidden_size(self) -> int:
        return self.W1.shape[0]

    @property
    def action_count(self) -> int:
        return self.W_a.shape[0]

    def items(self) -> Iterator[Tuple[str, np.ndarray]]:
        for name in PARAM_NAMES:
            yield name, getattr(self, name)

    def as_dict(self) -> Dict[str, np.ndarray]:
        return dict(self.items())

    def copy(self) -> "QNetParams":
        return QNetParams(**{name: np.array(value, copy=True) for name, value in self.items()})

    def zeros_like(self) -> "QNetParams":
        return QNetParams(**{name: np.zeros_like(value) for name, value in self.items()})

    def squared_norm(self) -> float:
        return float(sum(np.sum(value * value) for _, value in self.items()))

    def all_finite(self) -> bool:
        return all(np.all(np.isfinite(value)) for _, value in self.items())


@dataclass
class ForwardCache:
    """Intermediate values kept by the forward pass for backpropagation."""
    x: np.ndarray
    z1: np.ndarray
    h: np.ndarray
    q: np.ndarray


def combine(value: np.ndarray, advantage: np.ndarray) -> np.ndarray:
    """Dueling aggregation ``q = V + A - mean(A)`` over the last axis."""
    value = np.asarray(value)
    return value[..., None] + advantage - advantage.mean(axis=-1, keepdims=True)


def forward_cached(params: QNetParams, states: np.ndarray) -> ForwardCache:
    """
    Batched forward pass keeping intermediates.

    Args:
        params: Network weights
        states: [batch, input] array

    Raises:
        ValueError: If the input width does not match the network
    """
    x = np.asarray(states, dtype=params.W1.dtype)
    if x.ndim != 2 or x.shape[1] != params.input_size:
        raise ValueError(f"Expected states of shape [batch, {params.input_size}], got {x.shape}")
    z1 = x @ params.W1.T + params.b1
    h = np.maximum(z1, 0.0)
    value = h @ params.w_v + params.b_v
    advantage = h @ params.W_a.T + params.b_a
    return ForwardCache(x=x, z1=z1, h=h, q=combine(value, advantage))


def forward(params: QNetParams, x: np.ndarray) -> np.ndarray:
    """
    Q-values for one state vector or a batch of them.

    Args:
        params: Network weights
        x: [input] or [batch, input]

    Returns:
        [actions] or [batch, actions]
    """
    x = np.asarray(x)
    if x.ndim == 1:
        return forward_cached(params, x[None, :]).q[0]
    return forward_cached(params, x).q


def backward_from_q(
    params: QNetParams,
    cache: ForwardCache,
    grad_q: np.ndarray,
    l2_weight: float = 0.0,
) -> QNetParams:
    """
    Backpropagate a gradient on the Q outputs to every weight.

    Args:
        params: Weights used for the forward pass
        cache: Forward intermediates
        grad_q: dLoss/dq, [batch, actions]
        l2_weight: Adds ``2 * l2_weight * param`` to every gradient

    Returns:
        Gradients with the same layout as ``params``
    """
    actions = params.action_count
    grad_v = grad_q.sum(axis=1)
    grad_a = grad_q - grad_q.sum(axis=1, keepdims=True) / actions

    grad_h = np.outer(grad_v, params.w_v) + grad_a @ params.W_a
    grad_z1 = grad_h * (cache.z1 > 0)

    grads = QNetParams(
        W1=grad_z1.T @ cache.x,
        b1=grad_z1.sum(axis=0),
        w_v=cache.h.T @ grad_v,
        b_v=np.array(grad_v.sum()),
        W_a=grad_a.T @ cache.h,
        b_a=grad_a.sum(axis=0),
    )
    if l2_weight:
        for name, value in params.items():
            getattr(grads, name)[...] += 2.0 * l2_weight * value
    return grads


def td_errors(q: np.ndarray, actions: np.ndarray, targets: np.ndarray) -> np.ndarray:
    """``y_i - Q(s_i, a_i)`` for a batch."""
    return targets - q[np.arange(len(actions)), actions]


def td_loss(
    params: QNetParams,
    states: np.ndarray,
    actions: np.ndarray,
    targets: np.ndarray,
    weights: np.ndarray,
    l2_weight: float = L2_WEIGHT,
) -> float:
    """Mean importance-weighted squared TD error plus the L2 penalty."""
    delta = td_errors(forward_cached(params, states).q, actions, targets)
    return float(np.mean(weights * delta**2) + l2_weight * params.squared_norm())


def backward(
    params: QNetParams,
    states: np.ndarray,
    actions: np.ndarray,
    targets: np.ndarray,
    weights: np.ndarray,
    l2_weight: float = L2_WEIGHT,
) -> Tuple[QNetParams, np.ndarray]:
    """
    Gradient of ``td_loss`` and the per-sample TD errors.

    Args:
        params: Network weights
        states: [batch, input]
        actions: [batch] action indices
        targets: [batch] regression targets y
        weights: [batch] importance weights, all positive
        l2_weight: L2 penalty weight

    Returns:
        (gradients, delta) with ``delta_i = y_i - Q(s_i, a_i)``

    Raises:
        ValueError: On non-finite targets
    """
    targets = np.asarray(targets, dtype=params.W1.dtype)
    if not np.all(np.isfinite(targets)):
        raise ValueError("Targets must be finite")
    actions = np.asarray(actions, dtype=np.int64)
    cache = forward_cached(params, states)
    delta = td_errors(cache.q, actions, targets)

    batch = len(actions)
    grad_q = np.zeros_like(cache.q)
    grad_q[np.arange(batch), actions] = -2.0 * np.asarray(weights) * delta / batch
    return backward_from_q(params, cache, grad_q, l2_weight), delta


def sync_target(params: QNetParams) -> QNetParams:
    """Deep copy of the online weights for use as the target network."""
    return params.copy()
