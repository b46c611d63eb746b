"""Kerr phase rotation and lumped amplification."""

import numpy as np

from ..waveform.types import ComplexSignal
from ..utils.errors import ChannelError
from .fiber import PLANCK_J_S


def kerr_rotate(signal: ComplexSignal, gamma_per_w_km: float, l_eff_km: float) -> ComplexSignal:
    """Rotate each sample by ``gamma * l_eff * |u|^2`` radians."""
    u = signal.samples
    return signal.with_samples(u * np.exp(1j * gamma_per_w_km * l_eff_km * np.abs(u) ** 2))


def ase_variance(gain_db: float, nf_db: float, carrier_hz: float, sample_rate: float) -> float:
    """Per-sample ASE power n_sp*(G-1)*h*nu*f_s with n_sp = NF/2."""
    n_sp = 10.0 ** (nf_db / 10.0) / 2.0
    gain = 10.0 ** (gain_db / 10.0)
    return n_sp * (gain - 1.0) * PLANCK_J_S * carrier_hz * sample_rate


def amplify(
    fields: np.ndarray,
    gain_db: float,
    nf_db: float,
    carrier_hz: float,
    sample_rate: float,
    rng: np.random.Generator | None,
) -> np.ndarray:
    """Lumped gain plus white circular Gaussian ASE on every sample of ``fields``.

    Noise is drawn with shape ``(2,) + fields.shape`` from ``rng``; ``None`` disables it.
    """
    if gain_db < 0:
        raise ChannelError(f"gain_db must be nonnegative, got {gain_db}")
    out = np.asarray(fields) * 10.0 ** (gain_db / 20.0)
    if rng is not None:
        sigma2 = ase_variance(gain_db, nf_db, carrier_hz, sample_rate)
        noise = rng.standard_normal((2,) + out.shape)
        out = out + np.sqrt(sigma2 / 2.0) * (noise[0] + 1j * noise[1])
    return out


def edfa(
    signal: ComplexSignal,
    gain_db: float,
    nf_db: float,
    carrier_hz: float,
    seed: int | np.random.Generator | None,
) -> ComplexSignal:
    """Amplify the field by ``gain_db`` and add white circular Gaussian ASE.

    Args:
        signal: Field entering the amplifier
        gain_db: Power gain
        nf_db: Noise figure
        carrier_hz: Optical carrier frequency
        seed: Noise seed or generator; ``None`` disables the noise

    Returns:
        Amplified (and noisy) field
    """
    rng = None if seed is None else np.random.default_rng(seed)
    out = amplify(signal.samples, gain_db, nf_db, carrier_hz, signal.sample_rate, rng)
    return signal.with_samples(out)
