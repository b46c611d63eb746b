"""Modulated analysis/synthesis filter banks."""

from .bank import (
    FilterBankSpec,
    SubbandSet,
    active_band_energy_fraction,
    analyze,
    make_filter_bank,
    modulation,
    synthesize,
)
from .prototype import (
    centered_response,
    design_prototype,
    design_synthesis_prototype,
    max_rolloff,
    raised_cosine_lowpass,
)

__all__ = [
    "FilterBankSpec",
    "SubbandSet",
    "active_band_energy_fraction",
    "analyze",
    "centered_response",
    "design_prototype",
    "design_synthesis_prototype",
    "make_filter_bank",
    "max_rolloff",
    "modulation",
    "raised_cosine_lowpass",
    "synthesize",
]
