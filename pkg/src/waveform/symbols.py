"""Transmitter symbol sources."""

import numpy as np

from ..utils.enums import Constellation
from ..utils.errors import SignalError
from .types import SignalSpec, SymbolSequence

_QAM_ORDERS = {
    Constellation.QPSK: 4,
    Constellation.QAM16: 16,
    Constellation.QAM64: 64,
}


def qam_constellation(order: int) -> np.ndarray:
    """Square QAM alphabet normalised to unit average energy.

    Args:
        order: Number of points; must be an even power of two (4, 16, 64, ...)

    Returns:
        Complex array of ``order`` points in row-major grid order
    """
    side = int(round(np.sqrt(order)))
    if order < 4 or side * side != order or side & (side - 1):
        raise SignalError(f"QAM order must be an even power of two, got {order}")
    levels = np.arange(-(side - 1), side, 2, dtype=float)
    points = (levels[None, :] + 1j * levels[:, None]).ravel()
    return points / np.sqrt(np.mean(np.abs(points) ** 2))


def generate_symbols(spec: SignalSpec) -> SymbolSequence:
    """Draw ``spec.n_symbols`` unit-energy symbols from ``spec.constellation``.

    Gaussian symbols are circularly symmetric with E|x|^2 = 1. The draw is a
    pure function of ``spec.seed``.
    """
    spec.validate()
    rng = np.random.default_rng(spec.seed)
    constellation = Constellation(spec.constellation)
    if constellation is Constellation.GAUSSIAN:
        draws = rng.standard_normal((2, spec.n_symbols))
        symbols = (draws[0] + 1j * draws[1]) / np.sqrt(2.0)
    else:
        alphabet = qam_constellation(_QAM_ORDERS[constellation])
        symbols = alphabet[rng.integers(0, alphabet.size, spec.n_symbols)]
    return SymbolSequence(symbols=symbols, baud=spec.baud, seed=spec.seed)
