"""Band-limited rate conversion."""

import numpy as np
from scipy.signal import resample

from ..utils.errors import SignalError
from .types import ComplexSignal


def resample_fft(signal: ComplexSignal, new_rate: float) -> ComplexSignal:
    """Ideal band-limited resampling to ``new_rate`` via the DFT.

    The sample count must scale to an integer, and so must ``t0_offset``.
    Downsampling discards spectral content beyond the new Nyquist band.
    """
    ratio = new_rate / signal.sample_rate
    n_new = len(signal) * ratio
    t0_new = signal.t0_offset * ratio
    if abs(n_new - round(n_new)) > 1e-9 or abs(t0_new - round(t0_new)) > 1e-9:
        raise SignalError(
            f"rate ratio {ratio:.6g} does not map {len(signal)} samples "
            f"(t0_offset {signal.t0_offset}) onto an integer grid"
        )
    if round(n_new) == len(signal):
        return signal
    samples = resample(signal.samples, int(round(n_new)))
    return ComplexSignal(
        samples=np.asarray(samples, dtype=np.complex128),
        sample_rate=new_rate,
        t0_offset=int(round(t0_new)),
    )
