"""Signal-level value types shared by every stage of the receiver."""

from dataclasses import dataclass

import numpy as np

from ..utils.enums import Constellation
from ..utils.errors import SignalError


@dataclass(frozen=True)
class ComplexSignal:
    """Uniformly sampled complex baseband waveform.

    Attributes:
        samples: Complex field samples in sqrt(W)
        sample_rate: Sampling rate 1/T in Hz
        t0_offset: Accumulated pipeline delay in samples at ``sample_rate``
    """

    samples: np.ndarray
    sample_rate: float
    t0_offset: int = 0

    def __post_init__(self) -> None:
        samples = np.asarray(self.samples, dtype=np.complex128)
        if samples.ndim != 1:
            raise SignalError(f"samples must be one-dimensional, got shape {samples.shape}")
        if not np.all(np.isfinite(samples)):
            raise SignalError("samples contain NaN or Inf")
        if self.sample_rate <= 0:
            raise SignalError(f"sample_rate must be positive, got {self.sample_rate}")
        if self.t0_offset < 0:
            raise SignalError(f"t0_offset must be nonnegative, got {self.t0_offset}")
        object.__setattr__(self, "samples", samples)

    def __len__(self) -> int:
        return self.samples.shape[0]

    @property
    def power_w(self) -> float:
        return float(np.mean(np.abs(self.samples) ** 2)) if len(self) else 0.0

    def with_samples(self, samples: np.ndarray, t0_offset: int | None = None) -> "ComplexSignal":
        """Return a copy carrying new samples at the same rate."""
        return ComplexSignal(
            samples=samples,
            sample_rate=self.sample_rate,
            t0_offset=self.t0_offset if t0_offset is None else t0_offset,
        )


@dataclass(frozen=True)
class SymbolSequence:
    """Transmitted or detected data symbols."""

    symbols: np.ndarray
    baud: float
    seed: int | None = None

    def __post_init__(self) -> None:
        symbols = np.asarray(self.symbols, dtype=np.complex128)
        if symbols.ndim != 1:
            raise SignalError(f"symbols must be one-dimensional, got shape {symbols.shape}")
        if not np.all(np.isfinite(symbols)):
            raise SignalError("symbols contain NaN or Inf")
        if self.baud <= 0:
            raise SignalError(f"baud must be positive, got {self.baud}")
        object.__setattr__(self, "symbols", symbols)

    def __len__(self) -> int:
        return self.symbols.shape[0]


@dataclass(frozen=True)
class SignalSpec:
    """Transmitter configuration."""

    baud: float = 32e9
    oversampling: int = 6
    rolloff: float = 0.1
    power_dbm: float = 0.0
    n_symbols: int = 4096
    seed: int = 0
    constellation: Constellation = Constellation.GAUSSIAN
    span_symbols: int = 64

    def validate(self) -> None:
        """Validate the specification.

        Raises:
            SignalError: If any field is out of range.
        """
        if self.baud <= 0:
            raise SignalError("baud must be positive")
        if self.oversampling < 2:
            raise SignalError("oversampling must be at least 2")
        if not 0 <= self.rolloff <= 1:
            raise SignalError("rolloff must be between 0 and 1")
        if self.n_symbols <= 0:
            raise SignalError("n_symbols must be positive")
        if self.span_symbols < 2:
            raise SignalError("span_symbols must be at least 2")

    @property
    def sample_rate(self) -> float:
        return self.baud * self.oversampling
