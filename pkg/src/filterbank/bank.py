"""Uniformly modulated analysis and synthesis filter banks.

Branch ``i`` is downconverted by exp(-j*2*pi*i*k/N) with ``k`` the absolute
input sample index, filtered by the analysis prototype and decimated by K
keeping samples 0, K, 2K, ... Synthesis inverts the chain with the same
absolute index so that branch phases cancel.
"""

from dataclasses import dataclass

import numpy as np

from ..utils.errors import FilterBankError
from ..waveform.filtering import fir_same
from ..waveform.types import ComplexSignal
from .prototype import DEFAULT_LENGTH, DEFAULT_ROLLOFF, design_prototype, design_synthesis_prototype


@dataclass(frozen=True)
class FilterBankSpec:
    """Filter-bank geometry and prototype taps.

    Attributes:
        n_subbands: Number of branches N
        downsample: Decimation factor K
        active_half_width: S; branches -S..S are processed
        analysis_taps: Analysis prototype A at rate 1/T
        synthesis_taps: Synthesis prototype at rate 1/T
        base_rate: Full sample rate 1/T in Hz
    """

    n_subbands: int
    downsample: int
    active_half_width: int
    analysis_taps: np.ndarray
    synthesis_taps: np.ndarray
    base_rate: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "analysis_taps", np.asarray(self.analysis_taps, dtype=float))
        object.__setattr__(self, "synthesis_taps", np.asarray(self.synthesis_taps, dtype=float))
        self.validate()

    def validate(self) -> None:
        if self.n_subbands < 1 or self.downsample < 1:
            raise FilterBankError("n_subbands and downsample must be positive")
        if self.downsample >= self.n_subbands and self.n_subbands > 1:
            raise FilterBankError(
                f"downsample {self.downsample} must be smaller than n_subbands {self.n_subbands}"
            )
        if self.active_half_width < 0 or 2 * self.active_half_width + 1 > self.n_subbands:
            raise FilterBankError(
                f"{2 * self.active_half_width + 1} active subbands exceed "
                f"n_subbands {self.n_subbands}"
            )
        for name in ("analysis_taps", "synthesis_taps"):
            taps = getattr(self, name)
            if taps.ndim != 1 or taps.size % 2 == 0:
                raise FilterBankError(f"{name} must be a one-dimensional odd-length vector")
        if self.base_rate <= 0:
            raise FilterBankError("base_rate must be positive")

    @property
    def indices(self) -> np.ndarray:
        return np.arange(-self.active_half_width, self.active_half_width + 1)

    @property
    def n_active(self) -> int:
        return 2 * self.active_half_width + 1

    @property
    def subband_rate_hz(self) -> float:
        return self.base_rate / self.downsample

    def omega(self, index: int | np.ndarray) -> np.ndarray | float:
        """Centre angular frequency 2*pi*i/(N*T) of branch ``index`` in rad/s."""
        return 2.0 * np.pi * np.asarray(index) * self.base_rate / self.n_subbands

    def with_taps(self, analysis_taps: np.ndarray, synthesis_taps: np.ndarray) -> "FilterBankSpec":
        return FilterBankSpec(
            n_subbands=self.n_subbands,
            downsample=self.downsample,
            active_half_width=self.active_half_width,
            analysis_taps=analysis_taps,
            synthesis_taps=synthesis_taps,
            base_rate=self.base_rate,
        )


@dataclass(frozen=True)
class SubbandSet:
    """Decimated branch signals, one row per active index.

    Attributes:
        samples: Complex array (n_active, n_sub) at ``sample_rate``
        indices: Branch indices, symmetric about zero
        sample_rate: Subband rate 1/(KT)
        full_length: Sample count of the full-rate signal the set came from
        t0_offset: Accumulated delay in full-rate samples
    """

    samples: np.ndarray
    indices: np.ndarray
    sample_rate: float
    full_length: int
    t0_offset: int = 0

    def __post_init__(self) -> None:
        samples = np.asarray(self.samples, dtype=np.complex128)
        indices = np.asarray(self.indices, dtype=int)
        if samples.ndim != 2 or samples.shape[0] != indices.size:
            raise FilterBankError(f"expected one row per index, got shape {samples.shape}")
        if not np.array_equal(indices, -indices[::-1]):
            raise FilterBankError("subband indices must be symmetric about zero")
        object.__setattr__(self, "samples", samples)
        object.__setattr__(self, "indices", indices)

    def __len__(self) -> int:
        return self.samples.shape[1]

    def with_samples(self, samples: np.ndarray, t0_offset: int | None = None) -> "SubbandSet":
        return SubbandSet(
            samples=samples,
            indices=self.indices,
            sample_rate=self.sample_rate,
            full_length=self.full_length,
            t0_offset=self.t0_offset if t0_offset is None else t0_offset,
        )


def make_filter_bank(
    n_subbands: int,
    downsample: int,
    active_half_width: int,
    base_rate: float,
    rolloff: float = DEFAULT_ROLLOFF,
    length: int = DEFAULT_LENGTH,
    tie_synthesis: bool = False,
) -> FilterBankSpec:
    """Build a bank with freshly designed prototypes.

    ``tie_synthesis`` initialises the synthesis prototype as K times the
    analysis prototype instead of the wider interpolation design.
    """
    analysis = design_prototype(n_subbands, downsample, rolloff, length)
    if tie_synthesis:
        synthesis = downsample * analysis
    else:
        synthesis = design_synthesis_prototype(n_subbands, downsample, rolloff, length)
    return FilterBankSpec(
        n_subbands=n_subbands,
        downsample=downsample,
        active_half_width=active_half_width,
        analysis_taps=analysis,
        synthesis_taps=synthesis,
        base_rate=base_rate,
    )


def modulation(indices: np.ndarray, n_samples: int, n_subbands: int) -> np.ndarray:
    """Carriers exp(+j*2*pi*i*k/N) for every index row and sample ``k``."""
    # Reduced modulo N so long records keep exact carriers.
    k = np.arange(n_samples)
    return np.exp(2j * np.pi * np.outer(indices, k % n_subbands) / n_subbands)


def analyze(u: ComplexSignal, spec: FilterBankSpec) -> SubbandSet:
    """Split ``u`` into the active decimated branches."""
    if abs(u.sample_rate - spec.base_rate) > 1e-6 * spec.base_rate:
        raise FilterBankError(
            f"signal rate {u.sample_rate} Hz does not match bank rate {spec.base_rate} Hz"
        )
    carriers = modulation(spec.indices, len(u), spec.n_subbands)
    filtered = fir_same(np.conj(carriers) * u.samples[None, :], spec.analysis_taps)
    return SubbandSet(
        samples=filtered[:, :: spec.downsample],
        indices=spec.indices,
        sample_rate=spec.subband_rate_hz,
        full_length=len(u),
        t0_offset=u.t0_offset,
    )


def synthesize(subbands: SubbandSet, spec: FilterBankSpec) -> ComplexSignal:
    """Interpolate, remodulate and sum the branches of ``subbands``.

    The prototypes are centred, so the output carries the input's
    ``t0_offset`` unchanged.
    """
    n = subbands.full_length
    upsampled = np.zeros((subbands.samples.shape[0], n), dtype=np.complex128)
    # Branches shorter than ceil(n/K) leave the tail zero.
    width = min(-(-n // spec.downsample), len(subbands))
    upsampled[:, : width * spec.downsample : spec.downsample] = subbands.samples[:, :width]
    filtered = fir_same(upsampled, spec.synthesis_taps)
    carriers = modulation(subbands.indices, n, spec.n_subbands)
    return ComplexSignal(
        samples=np.sum(carriers * filtered, axis=0),
        sample_rate=spec.base_rate,
        t0_offset=subbands.t0_offset,
    )


def active_band_energy_fraction(signal: ComplexSignal, spec: FilterBankSpec) -> float:
    """Share of the periodogram energy inside the active branches' nominal band."""
    spectrum = np.abs(np.fft.fft(signal.samples)) ** 2
    freqs = np.fft.fftfreq(len(signal), d=1.0 / signal.sample_rate)
    edge = (spec.active_half_width + 0.5) * spec.base_rate / spec.n_subbands
    total = spectrum.sum()
    if total == 0:
        raise FilterBankError("signal has no energy")
    return float(spectrum[np.abs(freqs) <= edge].sum() / total)
