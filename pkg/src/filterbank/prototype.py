"""Raised-cosine prototype design for modulated filter banks."""

import numpy as np
from scipy.signal import freqz
from scipy.signal.windows import kaiser

from ..utils.errors import FilterBankError

DEFAULT_ROLLOFF = 0.25
DEFAULT_LENGTH = 193
KAISER_BETA = 5.0


def max_rolloff(n_subbands: int, downsample: int) -> float:
    """Largest analysis rolloff whose band edge stays below 1/(2KT)."""
    return n_subbands / downsample - 1.0


def raised_cosine_lowpass(
    cutoff: float, rolloff: float, length: int, beta: float = KAISER_BETA
) -> np.ndarray:
    """Kaiser-windowed raised-cosine lowpass with -6 dB point at ``cutoff`` cycles/sample.

    The unwindowed response vanishes at nonzero multiples of 1/(2*cutoff).
    """
    if length < 1 or length % 2 == 0:
        raise FilterBankError(f"prototype length must be odd, got {length}")
    if not 0 < cutoff <= 0.5:
        raise FilterBankError(f"cutoff must be in (0, 0.5], got {cutoff}")
    if not 0 <= rolloff <= 1:
        raise FilterBankError(f"rolloff must be in [0, 1], got {rolloff}")

    n = np.arange(length) - (length - 1) // 2
    x = 2.0 * cutoff * n
    taps = 2.0 * cutoff * np.sinc(x)
    if rolloff > 0:
        denom = 1.0 - (2.0 * rolloff * x) ** 2
        singular = np.isclose(denom, 0.0, atol=1e-12)
        shaped = np.cos(np.pi * rolloff * x) / np.where(singular, 1.0, denom)
        # Limit of cos(pi*r*x) / (1 - (2*r*x)^2) at x = 1/(2r).
        shaped[singular] = np.pi / 4.0
        taps = taps * shaped
    return taps * kaiser(length, beta)


def design_prototype(
    n_subbands: int,
    downsample: int,
    rolloff: float = DEFAULT_ROLLOFF,
    length: int = DEFAULT_LENGTH,
) -> np.ndarray:
    """Analysis prototype: raised-cosine lowpass with cutoff 1/(2N), unit DC gain.

    Args:
        n_subbands: Number of filter-bank branches N
        downsample: Decimation factor K
        rolloff: Raised-cosine rolloff of the prototype
        length: Odd tap count

    Returns:
        Symmetric real taps summing to one

    Raises:
        FilterBankError: If the band edge (1+rolloff)/(2N) would alias after K-fold decimation
    """
    limit = max_rolloff(n_subbands, downsample)
    if rolloff > limit + 1e-12:
        raise FilterBankError(
            f"rolloff {rolloff} aliases after decimation by {downsample} with {n_subbands} "
            f"subbands; the band edge (1+rolloff)/(2N) must not exceed 1/(2K), "
            f"so rolloff <= {limit:.4g}"
        )
    taps = raised_cosine_lowpass(0.5 / n_subbands, rolloff, length)
    return taps / taps.sum()


def design_synthesis_prototype(
    n_subbands: int,
    downsample: int,
    rolloff: float = DEFAULT_ROLLOFF,
    length: int = DEFAULT_LENGTH,
) -> np.ndarray:
    """Interpolation prototype with DC gain K.

    Flat up to the analysis band edge (1+rolloff)/(2N) and stopped from the
    first decimation image at 1/K - (1+rolloff)/(2N).
    """
    synthesis_rolloff = 1.0 - downsample * (1.0 + rolloff) / n_subbands
    if synthesis_rolloff < -1e-12:
        raise FilterBankError(f"rolloff {rolloff} leaves no room for the interpolation filter")
    taps = raised_cosine_lowpass(0.5 / downsample, max(synthesis_rolloff, 0.0), length)
    return downsample * taps / taps.sum()


def centered_response(taps: np.ndarray, freqs: np.ndarray) -> np.ndarray:
    """Frequency response of centred taps at ``freqs`` in cycles/sample."""
    taps = np.asarray(taps)
    center = (taps.shape[-1] - 1) // 2
    freqs = np.asarray(freqs, dtype=float)
    # freqz measures phase from tap 0; re-centre on the middle tap.
    _, response = freqz(taps, worN=2.0 * np.pi * freqs)
    return response * np.exp(2j * np.pi * freqs * center)
