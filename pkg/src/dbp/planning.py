"""Step planning locked to the subband walk-off grid.

A step of ``delta`` km shifts neighbouring subbands against each other by
exactly one subband sample, so steps that are integer multiples of ``delta``
compensate walk-off with pure delay elements.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from ..channel.fiber import PS2_TO_S2
from ..utils.errors import EngineError

SNAP_TOLERANCE = 1e-9


@dataclass(frozen=True)
class PlannedStep:
    xi_km: float
    multiple: int


@dataclass(frozen=True)
class StepPlan:
    """Backpropagation steps: uniform delta-locked steps plus an optional residual.

    Attributes:
        steps: Uniform steps of ``multiple * delta_km``
        residual_km: Final step that is not a multiple of ``delta_km`` (0 if none)
        delta_km: Walk-off locking distance
    """

    steps: tuple[PlannedStep, ...]
    residual_km: float
    delta_km: float
    multiple: int = field(default=1)

    @property
    def distances_km(self) -> list[float]:
        distances = [s.xi_km for s in self.steps]
        if self.residual_km > 0:
            distances.append(self.residual_km)
        return distances

    @property
    def n_steps(self) -> int:
        return len(self.steps) + (1 if self.residual_km > 0 else 0)

    @property
    def total_km(self) -> float:
        return float(sum(self.distances_km))


def compute_delta(
    n_subbands: int, downsample: int, sample_period_s: float, beta2_ps2_per_km: float
) -> tuple[float, float]:
    """Distance over which adjacent subbands walk off by one subband sample.

    Returns:
        (delta in km, subband sample period K*T in s)
    """
    if beta2_ps2_per_km == 0:
        raise EngineError("walk-off locking is undefined for beta2 = 0")
    beta2 = abs(beta2_ps2_per_km) * PS2_TO_S2
    delta = n_subbands * downsample * sample_period_s**2 / (2.0 * np.pi * beta2)
    return float(delta), downsample * sample_period_s


def plan_steps(total_km: float, delta_km: float, multiple: int) -> StepPlan:
    """Cover ``total_km`` with steps of ``multiple * delta_km`` and one remainder step."""
    if total_km <= 0 or delta_km <= 0:
        raise EngineError("total_km and delta_km must be positive")
    if multiple < 1:
        raise EngineError(f"step multiple must be at least 1, got {multiple}")
    xi = multiple * delta_km
    n_full = int(math.floor(total_km / xi + SNAP_TOLERANCE))
    residual = total_km - n_full * xi
    if residual < SNAP_TOLERANCE * max(total_km, 1.0):
        residual = 0.0
    return StepPlan(
        steps=tuple(PlannedStep(xi_km=xi, multiple=multiple) for _ in range(n_full)),
        residual_km=residual,
        delta_km=delta_km,
        multiple=multiple,
    )


def walk_off_delay(
    index: int,
    xi_km: float,
    beta2_ps2_per_km: float,
    n_subbands: int,
    sample_period_s: float,
    downsample: int,
) -> tuple[int, float]:
    """Walk-off compensation delay of subband ``index`` in subband samples.

    The delay is t_i = -beta2 * xi * omega_i, split into an integer part and a
    fractional remainder in [0, 1).
    """
    omega = 2.0 * np.pi * index / (n_subbands * sample_period_s)
    t_i = -beta2_ps2_per_km * PS2_TO_S2 * xi_km * omega
    raw = t_i / (downsample * sample_period_s)
    nearest = round(raw)
    if abs(raw - nearest) < SNAP_TOLERANCE:
        return int(nearest), 0.0
    whole = math.floor(raw)
    return int(whole), float(raw - whole)
