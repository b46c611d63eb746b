"""Subband time-domain backpropagation datapath."""

import logging

import numpy as np

from ..filterbank.bank import SubbandSet
from ..utils.errors import EngineError
from ..waveform.filtering import fir_same, shift_rows
from .cd_filter import apply_cd
from .layout import EngineLayout
from .mimo import mimo_intensity_filter, nonlinear_phase_rotate
from .params import DbpParams

logger = logging.getLogger(__name__)


def run_step(u: np.ndarray, params: DbpParams, layout: EngineLayout, step: int) -> np.ndarray:
    """One backpropagation step on subband rows ``u``.

    Dispersion filter, intensity tap, integer walk-off delays, MIMO
    intensity filter and phase rotation, in that order.
    """
    v = apply_cd(u, params.cd_half_taps[step])
    # Intensities are tapped before the delays; the phase drive lands after them.
    a = np.abs(v) ** 2 / params.p_ref_w
    w = shift_rows(v, layout.delays[step])
    b = mimo_intensity_filter(params.mimo[step], a, params.mimo_masks[step])
    return nonlinear_phase_rotate(w, b)


def finish(u: np.ndarray, params: DbpParams) -> np.ndarray:
    """Fractional walk-off filters followed by the accumulated phase."""
    # Causal Lagrange taps; their group delay is counted in layout.t0_offset.
    u = fir_same(u, params.frac_taps, center=0)
    return u * np.exp(1j * params.phase)[:, None]


def dbp_process(subbands: SubbandSet, params: DbpParams, layout: EngineLayout) -> SubbandSet:
    """Backpropagate ``subbands`` through every planned step.

    Args:
        subbands: Analysis output at rate 1/(KT)
        params: Engine parameters
        layout: Delays and orders derived from the step plan

    Returns:
        Processed subbands whose ``t0_offset`` includes the engine delay

    Raises:
        EngineError: If params, layout and subbands disagree
    """
    params.check_layout(layout)
    if not np.array_equal(subbands.indices, layout.indices):
        raise EngineError(
            f"subband indices {subbands.indices} do not match layout {layout.indices}"
        )

    u = subbands.samples
    for step in range(layout.n_steps):
        u = run_step(u, params, layout, step)
    u = finish(u, params)
    logger.debug(
        "Subband backpropagation done",
        extra={"fields": {"steps": layout.n_steps, "t0_offset": layout.t0_offset}},
    )
    return subbands.with_samples(u, t0_offset=subbands.t0_offset + layout.t0_offset)
