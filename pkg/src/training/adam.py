"""Adam optimiser as a pure function over flat parameter vectors."""

from dataclasses import dataclass, replace

import numpy as np

from ..utils.errors import TapeError


@dataclass(frozen=True)
class AdamState:
    """Moment estimates and hyperparameters."""

    m: np.ndarray
    v: np.ndarray
    step: int = 0
    lr: float = 1e-3
    b1: float = 0.9
    b2: float = 0.999
    eps: float = 1e-8

    @classmethod
    def zeros(
        cls,
        size: int,
        lr: float = 1e-3,
        b1: float = 0.9,
        b2: float = 0.999,
        eps: float = 1e-8,
    ) -> "AdamState":
        return cls(m=np.zeros(size), v=np.zeros(size), step=0, lr=lr, b1=b1, b2=b2, eps=eps)


def adam_step(
    state: AdamState, params: np.ndarray, grads: np.ndarray
) -> tuple[AdamState, np.ndarray]:
    """One bias-corrected Adam update.

    Returns:
        (new state, new parameter vector); inputs are not modified
    """
    if params.shape != grads.shape or params.shape != state.m.shape:
        raise TapeError(
            f"shape mismatch: params {params.shape}, grads {grads.shape}, state {state.m.shape}"
        )
    step = state.step + 1
    m = state.b1 * state.m + (1.0 - state.b1) * grads
    v = state.b2 * state.v + (1.0 - state.b2) * grads**2
    m_hat = m / (1.0 - state.b1**step)
    v_hat = v / (1.0 - state.b2**step)
    update = state.lr * m_hat / (np.sqrt(v_hat) + state.eps)
    return replace(state, m=m, v=v, step=step), params - update


@dataclass
class PlateauSchedule:
    """Multiply the learning rate by ``factor`` after ``patience`` checks without improvement."""

    patience: int = 10
    factor: float = 0.5
    min_lr: float = 1e-6
    best: float = float("inf")
    stale: int = 0

    def update(self, metric: float, lr: float) -> float:
        if metric < self.best:
            self.best = metric
            self.stale = 0
            return lr
        self.stale += 1
        if self.stale >= self.patience:
            self.stale = 0
            return max(lr * self.factor, self.min_lr) if lr > 0 else lr
        return lr
