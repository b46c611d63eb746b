"""Exact frequency-domain dispersion operators."""

import numpy as np

from ..waveform.types import ComplexSignal
from .fiber import PS2_TO_S2, FiberParams

FORWARD = -1
COMPENSATE = 1


def angular_frequency(n_samples: int, sample_rate: float) -> np.ndarray:
    """DFT bin frequencies in rad/s, numpy ordering."""
    return 2.0 * np.pi * np.fft.fftfreq(n_samples, d=1.0 / sample_rate)


def cd_response(omega: np.ndarray, xi_km: float, beta2_ps2_per_km: float, sign: int) -> np.ndarray:
    """Dispersion transfer function exp(j*sign*kappa*omega^2), kappa = beta2*xi/2."""
    kappa = 0.5 * beta2_ps2_per_km * PS2_TO_S2 * xi_km
    return np.exp(1j * sign * kappa * omega**2)


def cd_exact(
    signal: ComplexSignal, xi_km: float, beta2_ps2_per_km: float, sign: int
) -> ComplexSignal:
    """Apply chromatic dispersion of ``xi_km`` by spectral multiplication.

    ``sign=+1`` compensates, ``sign=-1`` propagates. The operator is an all-pass
    circular convolution over the whole record.
    """
    omega = angular_frequency(len(signal), signal.sample_rate)
    spectrum = np.fft.fft(signal.samples) * cd_response(omega, xi_km, beta2_ps2_per_km, sign)
    return signal.with_samples(np.fft.ifft(spectrum))


def linear_equalize(signal: ComplexSignal, fiber: FiberParams) -> ComplexSignal:
    """Compensate the accumulated dispersion of the whole link."""
    return cd_exact(signal, fiber.total_km, fiber.beta2_ps2_per_km, COMPENSATE)
