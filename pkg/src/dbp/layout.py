"""Static bookkeeping of the subband engine derived from a step plan."""

import math
from dataclasses import dataclass

import numpy as np

from ..channel.fiber import PS2_TO_S2
from ..filterbank.bank import FilterBankSpec
from ..utils.errors import EngineError
from .fractional import DEFAULT_TAPS, lagrange_group_delay
from .planning import StepPlan, walk_off_delay


@dataclass(frozen=True)
class EngineLayout:
    """Per-step integer delays, MIMO orders and delay bookkeeping.

    Attributes:
        xi_km: Distance of every step
        delays: Nonnegative integer delay per step and subband, shape (M, R)
        common_offsets: Subband samples added per step to keep delays causal
        orders: MIMO polynomial order per step
        n_factors: Factors per MIMO cascade
        fractional: Residual fractional walk-off per subband in [0, 1)
        frac_taps: Length of the fractional-delay filters
        downsample: K
        indices: Active subband indices
        initial_phase: Accumulated dispersion phase with the common-delay correction
    """

    xi_km: tuple[float, ...]
    delays: np.ndarray
    common_offsets: tuple[int, ...]
    orders: tuple[int, ...]
    n_factors: int
    fractional: np.ndarray
    frac_taps: int
    downsample: int
    indices: np.ndarray
    initial_phase: np.ndarray

    @property
    def n_steps(self) -> int:
        return len(self.xi_km)

    @property
    def n_active(self) -> int:
        return self.indices.size

    @property
    def subband_offset(self) -> int:
        """Total delay added by the engine in subband samples."""
        return int(sum(self.common_offsets)) + lagrange_group_delay(self.frac_taps)

    @property
    def t0_offset(self) -> int:
        """Total delay added by the engine in full-rate samples."""
        return self.downsample * self.subband_offset

    def factor_shape(self, step: int) -> tuple[int, int, int]:
        return self.n_active, self.n_active, self.orders[step] // self.n_factors + 1


def _round_up(value: int, multiple: int) -> int:
    return -(-value // multiple) * multiple


def build_layout(
    plan: StepPlan,
    bank: FilterBankSpec,
    beta2_ps2_per_km: float,
    n_factors: int = 3,
    frac_taps: int = DEFAULT_TAPS,
) -> EngineLayout:
    """Derive delays, orders and phases for ``plan`` on ``bank``.

    Delta-locked steps get order ``multiple * (R - 1)``; the residual step gets
    ``ceil(residual / delta) * (R - 1)``. Both are rounded up to a multiple of
    ``n_factors``.
    """
    if n_factors < 1:
        raise EngineError("n_factors must be at least 1")
    period = 1.0 / bank.base_rate
    indices = bank.indices
    spread = indices.size - 1

    xi, delays, offsets, orders = [], [], [], []
    fractional = np.zeros(indices.size)
    for step, distance in enumerate(plan.distances_km):
        parts = [
            walk_off_delay(
                int(i), distance, beta2_ps2_per_km, bank.n_subbands, period, bank.downsample
            )
            for i in indices
        ]
        whole = np.array([p[0] for p in parts], dtype=int)
        frac = np.array([p[1] for p in parts])
        residual_step = step >= len(plan.steps)
        if not residual_step and np.any(frac):
            raise EngineError(f"step {step} of {distance} km is not locked to the walk-off grid")
        if residual_step:
            # Only the residual step leaves a fractional remainder for the final filters.
            fractional = frac
            multiple = math.ceil(distance / plan.delta_km - 1e-9)
        else:
            multiple = plan.steps[step].multiple
        # Shift so the leading subband has zero delay.
        offset = -int(whole.min())
        xi.append(distance)
        delays.append(whole + offset)
        offsets.append(offset)
        order = max(_round_up(multiple * spread, n_factors), int(whole.max() + offset))
        orders.append(_round_up(order, n_factors))

    layout = EngineLayout(
        xi_km=tuple(xi),
        delays=np.array(delays, dtype=int).reshape(len(xi), indices.size),
        common_offsets=tuple(offsets),
        orders=tuple(orders),
        n_factors=n_factors,
        fractional=fractional,
        frac_taps=frac_taps,
        downsample=bank.downsample,
        indices=indices,
        initial_phase=np.zeros(indices.size),
    )
    omega = bank.omega(indices)
    dispersion_phase = 0.5 * beta2_ps2_per_km * PS2_TO_S2 * plan.total_km * omega**2
    # A common delay of c subband samples rotates branch i by 2*pi*i*K*c/N.
    shift = indices * bank.downsample * layout.subband_offset / bank.n_subbands
    phase = dispersion_phase - 2.0 * np.pi * shift
    object.__setattr__(layout, "initial_phase", np.mod(phase + np.pi, 2 * np.pi) - np.pi)
    return layout
