"""Power conversions and symbol-level quality metrics."""

import numpy as np

from ..utils.errors import SignalError
from .types import ComplexSignal, SymbolSequence

# Error floor relative to signal power; a perfect match reports this ceiling.
SNR_CEILING_DB = 100.0


def dbm_to_watt(power_dbm: float) -> float:
    return 1e-3 * 10.0 ** (power_dbm / 10.0)


def watt_to_dbm(power_w: float) -> float:
    if power_w <= 0:
        raise SignalError(f"power must be positive, got {power_w}")
    return 10.0 * np.log10(power_w / 1e-3)


def signal_power(signal: ComplexSignal | np.ndarray) -> float:
    """Mean |x|^2 of a signal or sample array."""
    samples = signal.samples if isinstance(signal, ComplexSignal) else np.asarray(signal)
    return float(np.mean(np.abs(samples) ** 2)) if samples.size else 0.0


def _trimmed(tx: SymbolSequence, rx: SymbolSequence, guard: int) -> tuple[np.ndarray, np.ndarray]:
    if len(tx) != len(rx):
        raise SignalError(f"length mismatch: tx has {len(tx)} symbols, rx has {len(rx)}")
    if guard < 0 or 2 * guard >= len(tx):
        raise SignalError(f"guard {guard} leaves no symbols out of {len(tx)}")
    stop = len(tx) - guard
    return tx.symbols[guard:stop], rx.symbols[guard:stop]


def align_scalar(tx: np.ndarray, rx: np.ndarray) -> complex:
    """Least-squares complex scalar ``a`` minimising mean|a*rx - tx|^2."""
    energy = np.vdot(rx, rx).real
    if energy == 0:
        raise SignalError("received symbols are all zero")
    return complex(np.vdot(rx, tx) / energy)


def align_and_snr(tx: SymbolSequence, rx: SymbolSequence, guard: int = 512) -> float:
    """SNR in dB after removing one common complex gain from ``rx``.

    Args:
        tx: Transmitted symbols
        rx: Detected symbols on the same grid
        guard: Symbols discarded at each end

    Returns:
        10*log10(E|tx|^2 / E|a*rx - tx|^2), capped at ``SNR_CEILING_DB``
    """
    t, r = _trimmed(tx, rx, guard)
    a = align_scalar(t, r)
    signal = np.mean(np.abs(t) ** 2)
    error = np.mean(np.abs(a * r - t) ** 2)
    floor = signal * 10.0 ** (-SNR_CEILING_DB / 10.0)
    return float(10.0 * np.log10(signal / max(error, floor)))


def normalized_correlation(tx: SymbolSequence, rx: SymbolSequence, guard: int = 0) -> float:
    """|<rx, tx>| / (||rx|| ||tx||) over the non-guard symbols."""
    t, r = _trimmed(tx, rx, guard)
    denom = np.linalg.norm(t) * np.linalg.norm(r)
    return float(abs(np.vdot(r, t)) / denom) if denom > 0 else 0.0
