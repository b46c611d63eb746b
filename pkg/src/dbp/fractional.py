"""Lagrange fractional-delay filters."""

import numpy as np

from ..utils.errors import EngineError

DEFAULT_TAPS = 8


def lagrange_group_delay(n_taps: int) -> int:
    """Integer part of the delay realised by a centred even-length Lagrange filter."""
    return n_taps // 2 - 1


def fractional_delay_taps(mu: float, n_taps: int = DEFAULT_TAPS) -> np.ndarray:
    """Causal Lagrange interpolator delaying by ``n_taps/2 - 1 + mu`` samples.

    Args:
        mu: Fractional delay in [0, 1)
        n_taps: Even number of taps

    Returns:
        Real taps ``h`` with ``y[n] = sum_k h[k] x[n - k]``
    """
    if n_taps < 2 or n_taps % 2:
        raise EngineError(f"n_taps must be even and at least 2, got {n_taps}")
    if not 0 <= mu < 1:
        raise EngineError(f"mu must be in [0, 1), got {mu}")
    delay = lagrange_group_delay(n_taps) + mu
    k = np.arange(n_taps)
    taps = np.ones(n_taps)
    for m in range(n_taps):
        others = k != m
        taps[others] *= (delay - m) / (k[others] - m)
    return taps
