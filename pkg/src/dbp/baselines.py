"""Reference backpropagation schemes the subband engine is compared against."""

import numpy as np

from ..channel.fiber import FiberParams, log_step_grid
from ..channel.ssfm import backpropagate_fields
from ..filterbank.bank import FilterBankSpec, SubbandSet
from ..utils.errors import EngineError
from .cd_filter import apply_cd


def scalar_tddbp(
    samples: np.ndarray,
    cd_half_taps: list[np.ndarray],
    coefficients: list[np.ndarray],
    p_ref_w: float,
) -> np.ndarray:
    """Conventional single-band time-domain DBP.

    Each step filters with its symmetric CD filter, then rotates every sample
    by a causal FIR filter of the normalised intensity.

    Args:
        samples: Received field at the DBP rate
        cd_half_taps: Half taps per step
        coefficients: Real intensity filter per step, lag 0 first
        p_ref_w: Intensity normalisation

    Returns:
        Backpropagated field
    """
    if len(cd_half_taps) != len(coefficients):
        raise EngineError("one intensity filter is needed per CD filter")
    u = np.asarray(samples, dtype=np.complex128)
    n = u.size
    for half_taps, taps in zip(cd_half_taps, coefficients):
        v = apply_cd(u, half_taps)
        a = np.abs(v) ** 2 / p_ref_w
        b = np.convolve(a, np.atleast_1d(taps))[:n]
        u = v * np.exp(1j * b)
    return u


def fd_subband_dbp_baseline(
    subbands: SubbandSet,
    bank: FilterBankSpec,
    fiber: FiberParams,
    stps: int,
) -> SubbandSet:
    """Split-step backpropagation per subband with exact frequency-domain dispersion.

    Every subband sees the dispersion of its position in the full band,
    including its walk-off and constant phase. Subbands exchange intensity
    through cross-phase modulation at every step. Intended for K = 1.
    """
    grid = log_step_grid(fiber.span_km, stps, fiber.alpha_db_per_km)
    rows = backpropagate_fields(
        subbands.samples,
        subbands.sample_rate,
        bank.omega(subbands.indices),
        fiber,
        grid,
    )
    return subbands.with_samples(rows)
