"""Fiber link constants and split-step grids.

Units follow the field names: distances in km, ``beta2`` in ps^2/km, ``gamma``
in 1/(W km). Conversions to SI happen through the properties below.
"""

from dataclasses import dataclass

import numpy as np

from ..utils.enums import GridScheme
from ..utils.errors import ChannelError

PS2_TO_S2 = 1e-24
PLANCK_J_S = 6.62607015e-34


@dataclass(frozen=True)
class FiberParams:
    """Standard single-mode fiber link made of identical amplified spans."""

    alpha_db_per_km: float = 0.2
    beta2_ps2_per_km: float = -21.7
    gamma_per_w_km: float = 1.3
    span_km: float = 100.0
    n_spans: int = 25
    nf_db: float = 4.5
    carrier_hz: float = 193.41e12

    def validate(self) -> None:
        """Validate link parameters.

        Raises:
            ChannelError: If any parameter is out of range.
        """
        if self.alpha_db_per_km < 0:
            raise ChannelError("alpha_db_per_km must be nonnegative")
        if self.span_km <= 0:
            raise ChannelError("span_km must be positive")
        if self.n_spans < 1:
            raise ChannelError("n_spans must be at least 1")
        if self.carrier_hz <= 0:
            raise ChannelError("carrier_hz must be positive")

    @property
    def total_km(self) -> float:
        return self.span_km * self.n_spans

    @property
    def alpha_lin_per_km(self) -> float:
        """Power attenuation coefficient in 1/km (natural log units)."""
        return self.alpha_db_per_km * np.log(10.0) / 10.0

    @property
    def beta2_s2_per_km(self) -> float:
        return self.beta2_ps2_per_km * PS2_TO_S2

    @property
    def span_gain_db(self) -> float:
        """Amplifier gain that exactly restores one span's loss."""
        return self.alpha_db_per_km * self.span_km


@dataclass(frozen=True)
class StepGrid:
    """Step boundaries inside one span, from 0 to ``span_km``."""

    boundaries: np.ndarray
    scheme: GridScheme = GridScheme.LOGARITHMIC

    def __post_init__(self) -> None:
        bounds = np.asarray(self.boundaries, dtype=float)
        if bounds.ndim != 1 or bounds.size < 2:
            raise ChannelError("a step grid needs at least two boundaries")
        if bounds[0] != 0.0:
            raise ChannelError("step grid must start at 0 km")
        if np.any(np.diff(bounds) <= 0):
            raise ChannelError("step grid boundaries must be strictly increasing")
        object.__setattr__(self, "boundaries", bounds)

    @property
    def steps_km(self) -> np.ndarray:
        return np.diff(self.boundaries)

    @property
    def span_km(self) -> float:
        return float(self.boundaries[-1])

    def __len__(self) -> int:
        return self.boundaries.size - 1


def uniform_step_grid(span_km: float, n_steps: int) -> StepGrid:
    if n_steps < 1:
        raise ChannelError(f"n_steps must be at least 1, got {n_steps}")
    bounds = np.linspace(0.0, span_km, n_steps + 1)
    return StepGrid(boundaries=bounds, scheme=GridScheme.UNIFORM)


def log_step_grid(span_km: float, n_steps: int, alpha_db_per_km: float) -> StepGrid:
    """Step grid on which every step dissipates the same fraction of launch power.

    Boundaries are ``x_k = -ln(1 - (k/n)(1 - exp(-a*L))) / a`` with ``a`` the
    linear power attenuation; ``alpha_db_per_km == 0`` gives a uniform grid.
    """
    if n_steps < 1:
        raise ChannelError(f"n_steps must be at least 1, got {n_steps}")
    a = alpha_db_per_km * np.log(10.0) / 10.0
    if a * span_km < 1e-12:
        grid = uniform_step_grid(span_km, n_steps)
        return StepGrid(boundaries=grid.boundaries, scheme=GridScheme.LOGARITHMIC)
    k = np.arange(n_steps + 1) / n_steps
    bounds = -np.log1p(-k * -np.expm1(-a * span_km)) / a
    bounds[0] = 0.0
    bounds[-1] = span_km
    return StepGrid(boundaries=bounds, scheme=GridScheme.LOGARITHMIC)


def effective_length(step_km: float, alpha_lin_per_km: float) -> float:
    """Nonlinear effective length (1 - exp(-a*d)) / a of a lossy step."""
    if alpha_lin_per_km * step_km < 1e-12:
        return step_km
    return float(-np.expm1(-alpha_lin_per_km * step_km) / alpha_lin_per_km)


def group_delay_spread(bandwidth_hz: float, distance_km: float, beta2_ps2_per_km: float) -> float:
    """Differential group delay in seconds across ``bandwidth_hz`` after ``distance_km``."""
    return abs(beta2_ps2_per_km * PS2_TO_S2) * distance_km * 2.0 * np.pi * bandwidth_hz
