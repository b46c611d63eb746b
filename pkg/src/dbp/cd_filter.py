"""Symmetric FIR filters for per-step dispersion compensation.

A filter with 2L+1 taps ``h[-L..L]`` satisfying ``h[k] == h[-k]`` is stored by its
L+1 half taps ``c[d] = h[d]``; its response is ``c[0] + 2*sum_d c[d]*cos(2*pi*f*d)``.
"""

from dataclasses import dataclass

import numpy as np
from scipy.linalg import lstsq

from ..channel.fiber import PS2_TO_S2
from ..utils.errors import EngineError

DEFAULT_GRID_POINTS = 1024


@dataclass(frozen=True)
class CdFilter:
    """Complex-symmetric CD compensation filter for one step."""

    half_taps: np.ndarray
    xi_km: float

    def __post_init__(self) -> None:
        half = np.asarray(self.half_taps, dtype=np.complex128)
        if half.ndim != 1 or half.size < 1:
            raise EngineError("half_taps must be a non-empty vector")
        object.__setattr__(self, "half_taps", half)

    @property
    def half_length(self) -> int:
        """L, so that the filter has 2L+1 taps."""
        return self.half_taps.size - 1

    @property
    def taps(self) -> np.ndarray:
        return unfold_taps(self.half_taps)

    @property
    def real_multiplications(self) -> int:
        """Real multiplications per output sample of the folded structure."""
        return 4 * (self.half_length + 1)


def unfold_taps(half_taps: np.ndarray) -> np.ndarray:
    return np.concatenate([half_taps[:0:-1], half_taps])


def cosine_basis(freqs: np.ndarray, half_length: int) -> np.ndarray:
    """Response of each half tap at ``freqs`` (cycles/sample), shape (len(freqs), L+1)."""
    d = np.arange(half_length + 1)
    basis = 2.0 * np.cos(2.0 * np.pi * np.outer(freqs, d))
    basis[:, 0] = 1.0
    return basis


def symmetric_response(half_taps: np.ndarray, freqs: np.ndarray) -> np.ndarray:
    return cosine_basis(freqs, half_taps.shape[-1] - 1) @ half_taps


def ideal_cd_response(
    freqs: np.ndarray, xi_km: float, beta2_ps2_per_km: float, sample_rate: float
) -> np.ndarray:
    """Target exp(j*kappa*omega^2) at ``freqs`` in cycles/sample."""
    kappa = 0.5 * beta2_ps2_per_km * PS2_TO_S2 * xi_km
    omega = 2.0 * np.pi * np.asarray(freqs) * sample_rate
    return np.exp(1j * kappa * omega**2)


def design_grid(band: float, n_points: int = DEFAULT_GRID_POINTS) -> np.ndarray:
    """Nonnegative design frequencies up to Nyquist; ``band`` marks the in-band edge."""
    if not 0 < band <= 0.5:
        raise EngineError(f"band edge must be in (0, 0.5], got {band}")
    return np.linspace(0.0, 0.5, n_points)


def ls_cd_filter(
    xi_km: float,
    beta2_ps2_per_km: float,
    half_length: int,
    sample_rate: float,
    band: float = 0.5,
    out_of_band_weight: float = 0.0,
    n_points: int = DEFAULT_GRID_POINTS,
) -> CdFilter:
    """Weighted least-squares fit of a symmetric filter to exp(j*kappa*omega^2).

    Args:
        xi_km: Distance compensated by the filter
        beta2_ps2_per_km: Group velocity dispersion
        half_length: L; the filter has 2L+1 taps
        sample_rate: Rate the filter runs at in Hz
        band: In-band edge in cycles/sample
        out_of_band_weight: Weight pulling the response towards zero beyond ``band``
        n_points: Design grid size over [0, 0.5]

    Returns:
        CdFilter with the least-squares half taps

    Raises:
        EngineError: If the weighted design matrix is rank deficient
    """
    if half_length < 1:
        raise EngineError(f"half_length must be at least 1, got {half_length}")
    if xi_km == 0:
        impulse = np.zeros(half_length + 1, dtype=np.complex128)
        impulse[0] = 1.0
        return CdFilter(half_taps=impulse, xi_km=0.0)

    freqs = design_grid(band, n_points)
    inside = freqs <= band
    weights = np.where(inside, 1.0, np.sqrt(out_of_band_weight))
    target = np.where(inside, ideal_cd_response(freqs, xi_km, beta2_ps2_per_km, sample_rate), 0.0)
    # out_of_band_weight = 0 drops the out-of-band rows entirely.
    keep = weights > 0
    matrix = weights[keep, None] * cosine_basis(freqs[keep], half_length)
    solution, _, rank, _ = lstsq(matrix.astype(np.complex128), weights[keep] * target[keep])
    if rank < half_length + 1:
        raise EngineError(
            f"least-squares design is rank deficient (rank {rank} < {half_length + 1})"
        )
    return CdFilter(half_taps=solution, xi_km=xi_km)


def truncated_cd_filter(
    xi_km: float,
    beta2_ps2_per_km: float,
    half_length: int,
    sample_rate: float,
    n_fft: int = 4096,
) -> CdFilter:
    """Frequency-sampled design: centre 2L+1 taps of the inverse DFT of the ideal response."""
    freqs = np.fft.fftfreq(n_fft)
    impulse = np.fft.ifft(ideal_cd_response(freqs, xi_km, beta2_ps2_per_km, sample_rate))
    # The response is even in frequency, so the impulse is symmetric about 0.
    half = impulse[: half_length + 1]
    return CdFilter(half_taps=half, xi_km=xi_km)


def inband_rms_error(
    cd_filter: CdFilter, beta2_ps2_per_km: float, sample_rate: float, band: float
) -> float:
    """RMS deviation from the ideal response over [0, band]."""
    freqs = np.linspace(0.0, band, DEFAULT_GRID_POINTS)
    error = symmetric_response(cd_filter.half_taps, freqs) - ideal_cd_response(
        freqs, cd_filter.xi_km, beta2_ps2_per_km, sample_rate
    )
    return float(np.sqrt(np.mean(np.abs(error) ** 2)))


def apply_cd(x: np.ndarray, half_taps: np.ndarray) -> np.ndarray:
    """Folded symmetric convolution along the last axis, zero boundaries.

    ``y[n] = c[0]*x[n] + sum_d c[d]*(x[n-d] + x[n+d])``.
    """
    x = np.asarray(x)
    half_length = half_taps.shape[-1] - 1
    n = x.shape[-1]
    pad = [(0, 0)] * (x.ndim - 1) + [(half_length, half_length)]
    padded = np.pad(x, pad)
    out = half_taps[0] * x.astype(np.result_type(x, half_taps))
    # One complex multiply per tap pair.
    for d in range(1, half_length + 1):
        early = padded[..., half_length - d : half_length - d + n]
        late = padded[..., half_length + d : half_length + d + n]
        out = out + half_taps[d] * (early + late)
    return out
