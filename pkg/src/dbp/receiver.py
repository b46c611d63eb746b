"""End-to-end receiver front-ends that turn a received waveform into symbols."""

import math
from dataclasses import dataclass

import numpy as np

from ..channel.fiber import FiberParams, group_delay_spread
from ..filterbank.bank import FilterBankSpec, analyze, synthesize
from ..waveform.pulse import matched_filter_downsample
from ..waveform.resample import resample_fft
from ..waveform.types import ComplexSignal, SymbolSequence
from .engine import dbp_process
from .layout import EngineLayout
from .params import DbpParams


def extend_periodic(signal: ComplexSignal, head: int, tail: int) -> ComplexSignal:
    """Extend a periodic record by ``head`` samples before and ``tail`` after.

    ``t0_offset`` grows by ``head`` so detection still lands on symbol 0.
    """
    n = len(signal)
    index = np.arange(-head, n + tail) % n
    return ComplexSignal(
        samples=signal.samples[index],
        sample_rate=signal.sample_rate,
        t0_offset=signal.t0_offset + head,
    )


def dispersion_memory(
    fiber: FiberParams, bandwidth_hz: float, sample_rate: float, multiple: int = 1
) -> int:
    """Samples spanned by the link's total group-delay spread, rounded up to ``multiple``."""
    spread = group_delay_spread(bandwidth_hz, fiber.total_km, fiber.beta2_ps2_per_km) * sample_rate
    samples = math.ceil(spread) + 1
    return -(-samples // multiple) * multiple


def prepare_received(
    rx: ComplexSignal,
    dbp_rate: float,
    head: int = 0,
    tail: int = 0,
) -> ComplexSignal:
    """Resample to the DBP rate and pad periodically."""
    return extend_periodic(resample_fft(rx, dbp_rate), head, tail)


def detect_symbols(
    signal: ComplexSignal,
    pulse_taps: np.ndarray,
    samples_per_symbol: int,
    n_symbols: int,
) -> SymbolSequence:
    """Matched filter at ``signal.t0_offset`` and keep the first ``n_symbols``."""
    symbols = matched_filter_downsample(signal, pulse_taps, samples_per_symbol, signal.t0_offset)
    return SymbolSequence(symbols=symbols.symbols[:n_symbols], baud=symbols.baud)


@dataclass
class SubbandDbpReceiver:
    """Analysis bank, subband DBP engine and synthesis bank in series."""

    bank: FilterBankSpec
    layout: EngineLayout
    params: DbpParams

    def process(self, signal: ComplexSignal) -> ComplexSignal:
        bank = self.params.bank(self.bank)
        subbands = analyze(signal, bank)
        return synthesize(dbp_process(subbands, self.params, self.layout), bank)

    def detect(
        self,
        signal: ComplexSignal,
        pulse_taps: np.ndarray,
        samples_per_symbol: int,
        n_symbols: int,
    ) -> SymbolSequence:
        return detect_symbols(self.process(signal), pulse_taps, samples_per_symbol, n_symbols)
