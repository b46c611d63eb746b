"""Complex baseband signals, symbols, pulse shaping and metrics."""

from .metrics import (
    align_and_snr,
    align_scalar,
    dbm_to_watt,
    normalized_correlation,
    signal_power,
    watt_to_dbm,
)
from .pulse import matched_filter_downsample, pulse_shape, rrc_taps
from .resample import resample_fft
from .symbols import generate_symbols, qam_constellation
from .types import ComplexSignal, SignalSpec, SymbolSequence

__all__ = [
    "ComplexSignal",
    "SignalSpec",
    "SymbolSequence",
    "align_and_snr",
    "align_scalar",
    "dbm_to_watt",
    "generate_symbols",
    "matched_filter_downsample",
    "normalized_correlation",
    "pulse_shape",
    "qam_constellation",
    "resample_fft",
    "rrc_taps",
    "signal_power",
    "watt_to_dbm",
]
