"""Root-raised-cosine pulse shaping and matched filtering."""

import math

import numpy as np

from ..utils.errors import SignalError
from .filtering import fir_same
from .metrics import dbm_to_watt
from .types import ComplexSignal, SymbolSequence


def rrc_taps(rolloff: float, span_symbols: int, oversampling: int) -> np.ndarray:
    """Unit-energy root-raised-cosine taps.

    Args:
        rolloff: Excess bandwidth in [0, 1]
        span_symbols: Filter span in symbols
        oversampling: Samples per symbol

    Returns:
        Symmetric real taps of length ``span_symbols * oversampling + 1``
    """
    if not 0 <= rolloff <= 1:
        raise SignalError(f"rolloff must be between 0 and 1, got {rolloff}")
    if span_symbols < 2 or oversampling < 1:
        raise SignalError("span_symbols must be >= 2 and oversampling >= 1")
    if (span_symbols * oversampling) % 2:
        raise SignalError("span_symbols * oversampling must be even for an odd tap count")

    half = span_symbols * oversampling // 2
    t = np.arange(-half, half + 1) / oversampling
    taps = np.empty_like(t)
    for k, tk in enumerate(t):
        taps[k] = _rrc_value(tk, rolloff)
    taps = 0.5 * (taps + taps[::-1])
    return taps / np.sqrt(np.sum(taps**2))


def _rrc_value(t: float, rho: float) -> float:
    if abs(t) < 1e-12:
        return 1.0 - rho + 4.0 * rho / math.pi
    if rho > 0 and abs(abs(t) - 1.0 / (4.0 * rho)) < 1e-9:
        arg = math.pi / (4.0 * rho)
        return rho / math.sqrt(2.0) * (
            (1.0 + 2.0 / math.pi) * math.sin(arg) + (1.0 - 2.0 / math.pi) * math.cos(arg)
        )
    num = math.sin(math.pi * t * (1.0 - rho)) + 4.0 * rho * t * math.cos(math.pi * t * (1.0 + rho))
    den = math.pi * t * (1.0 - (4.0 * rho * t) ** 2)
    return num / den


def pulse_shape(
    symbols: SymbolSequence,
    taps: np.ndarray,
    oversampling: int,
    power_dbm: float,
) -> ComplexSignal:
    """Upsample, filter with ``taps`` and scale to the launch power.

    The scale assumes unit-energy symbols and taps, so the mean output power
    equals ``power_dbm`` in expectation. The pulse of symbol ``n`` peaks at
    sample ``n * oversampling``.
    """
    upsampled = np.zeros(len(symbols) * oversampling, dtype=np.complex128)
    upsampled[::oversampling] = symbols.symbols
    scale = np.sqrt(dbm_to_watt(power_dbm) * oversampling)
    return ComplexSignal(
        samples=scale * fir_same(upsampled, np.asarray(taps, dtype=float)),
        sample_rate=symbols.baud * oversampling,
    )


def matched_filter_downsample(
    signal: ComplexSignal,
    taps: np.ndarray,
    oversampling: int,
    delay_samples: int,
) -> SymbolSequence:
    """Matched-filter ``signal`` and pick one sample per symbol.

    Args:
        signal: Received waveform
        taps: Transmit pulse taps (real, symmetric)
        oversampling: Samples per symbol of ``signal``
        delay_samples: Index of the first symbol's peak, normally ``signal.t0_offset``

    Returns:
        Unscaled symbol-rate samples starting at ``delay_samples``
    """
    n = len(signal)
    if not 0 <= delay_samples < n:
        raise SignalError(f"delay {delay_samples} out of range for {n} samples")
    filtered = fir_same(signal.samples, np.conj(np.asarray(taps))[::-1])
    return SymbolSequence(
        symbols=filtered[delay_samples::oversampling],
        baud=signal.sample_rate / oversampling,
    )
