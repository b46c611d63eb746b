"""Symmetric split-step propagation and its exact inverse.

The baseband convention is exp(+j*omega*t): forward propagation applies
``exp(-j*kappa*omega^2)`` dispersion and ``exp(-j*gamma*L_eff*|u|^2)`` Kerr phase,
and backpropagation applies the conjugate operators in reverse order.

The multi-field core treats each row as a band centred at its own angular
frequency offset. Rows see the exact dispersion of their band position and
exchange intensity through cross-phase modulation with weight 2.
"""

import logging

import numpy as np

from ..utils.errors import ChannelError
from ..waveform.types import ComplexSignal
from .fiber import FiberParams, StepGrid, effective_length, log_step_grid
from .linear import COMPENSATE, FORWARD, angular_frequency, cd_response
from .nonlinear import amplify

logger = logging.getLogger(__name__)

MIN_SAMPLES_PER_SYMBOL = 4


def _dispersion(
    fields: np.ndarray, omega: np.ndarray, xi_km: float, beta2: float, sign: int
) -> np.ndarray:
    response = cd_response(omega, xi_km, beta2, sign)
    return np.fft.ifft(np.fft.fft(fields, axis=-1) * response, axis=-1)


def _nonlinear_phase(fields: np.ndarray) -> np.ndarray:
    power = np.abs(fields) ** 2
    # SPM only for a single field; XPM from every other row counts twice.
    if fields.shape[0] == 1:
        return power
    return 2.0 * power.sum(axis=0, keepdims=True) - power


def _check_grid(fiber: FiberParams, grid: StepGrid) -> None:
    fiber.validate()
    if abs(grid.span_km - fiber.span_km) > 1e-9 * fiber.span_km:
        raise ChannelError(f"step grid covers {grid.span_km} km but spans are {fiber.span_km} km")


def propagate_fields(
    fields: np.ndarray,
    sample_rate: float,
    offsets: np.ndarray,
    fiber: FiberParams,
    grid: StepGrid,
    seed: int | None = None,
) -> np.ndarray:
    """Propagate band rows through every span of ``fiber``.

    Args:
        fields: Complex array (rows, samples)
        sample_rate: Sample rate of every row in Hz
        offsets: Angular centre frequency of each row in rad/s
        fiber: Link description
        grid: Step boundaries within one span
        seed: ASE seed; ``None`` propagates without noise

    Returns:
        Propagated rows
    """
    _check_grid(fiber, grid)
    u = np.array(fields, dtype=np.complex128)
    omega = angular_frequency(u.shape[-1], sample_rate)[None, :] + np.asarray(offsets)[:, None]
    alpha = fiber.alpha_lin_per_km
    rng = None if seed is None else np.random.default_rng(seed)

    for span in range(fiber.n_spans):
        for step in grid.steps_km:
            u = _dispersion(u, omega, step / 2, fiber.beta2_ps2_per_km, FORWARD)
            # Kerr at the step midpoint with the effective length of the full step.
            l_eff = effective_length(step, alpha)
            u = u * np.exp(-1j * fiber.gamma_per_w_km * l_eff * _nonlinear_phase(u))
            u = u * np.exp(-alpha * step / 2)
            u = _dispersion(u, omega, step / 2, fiber.beta2_ps2_per_km, FORWARD)
        # Lumped EDFA restores the span loss.
        u = amplify(u, fiber.span_gain_db, fiber.nf_db, fiber.carrier_hz, sample_rate, rng)
        logger.debug(
            "Span propagated",
            extra={"fields": {"span": span + 1, "power_w": float(np.mean(np.abs(u) ** 2))}},
        )
    return u


def backpropagate_fields(
    fields: np.ndarray,
    sample_rate: float,
    offsets: np.ndarray,
    fiber: FiberParams,
    grid: StepGrid,
) -> np.ndarray:
    """Invert :func:`propagate_fields` step by step, spans in reverse order.

    Each step undoes a forward step on the same grid exactly in the absence
    of noise.
    """
    _check_grid(fiber, grid)
    u = np.array(fields, dtype=np.complex128)
    omega = angular_frequency(u.shape[-1], sample_rate)[None, :] + np.asarray(offsets)[:, None]
    alpha = fiber.alpha_lin_per_km
    inverse_gain = 10.0 ** (-fiber.span_gain_db / 20.0)

    for _ in range(fiber.n_spans):
        u = u * inverse_gain
        for step in grid.steps_km[::-1]:
            u = _dispersion(u, omega, step / 2, fiber.beta2_ps2_per_km, COMPENSATE)
            u = u * np.exp(alpha * step / 2)
            l_eff = effective_length(step, alpha)
            u = u * np.exp(1j * fiber.gamma_per_w_km * l_eff * _nonlinear_phase(u))
            u = _dispersion(u, omega, step / 2, fiber.beta2_ps2_per_km, COMPENSATE)
    return u


def ssfm_propagate(
    signal: ComplexSignal,
    fiber: FiberParams,
    grid: StepGrid,
    samples_per_symbol: int = 6,
    seed: int | None = None,
) -> ComplexSignal:
    """Forward-simulate ``signal`` over the whole link.

    Args:
        signal: Launched field
        fiber: Link description
        grid: Step boundaries within one span
        samples_per_symbol: Oversampling of ``signal``
        seed: ASE seed; ``None`` disables amplifier noise

    Returns:
        Received field at the same rate
    """
    if len(signal) < 2:
        raise ChannelError("signal must have at least two samples")
    if samples_per_symbol < MIN_SAMPLES_PER_SYMBOL:
        logger.warning(
            "Oversampling may not cover nonlinear spectral broadening",
            extra={"fields": {"samples_per_symbol": samples_per_symbol}},
        )
    rows = signal.samples[None, :]
    out = propagate_fields(rows, signal.sample_rate, np.zeros(1), fiber, grid, seed)
    return signal.with_samples(out[0])


def full_dbp_baseline(
    signal: ComplexSignal,
    fiber: FiberParams,
    stps: int,
    samples_per_symbol: int = 2,
) -> ComplexSignal:
    """Single-band digital backpropagation with ``stps`` logarithmic steps per span."""
    if len(signal) < 2:
        raise ChannelError("signal must have at least two samples")
    logger.debug(
        "Running full DBP",
        extra={"fields": {"stps": stps, "samples_per_symbol": samples_per_symbol}},
    )
    grid = log_step_grid(fiber.span_km, stps, fiber.alpha_db_per_km)
    rows = signal.samples[None, :]
    out = backpropagate_fields(rows, signal.sample_rate, np.zeros(1), fiber, grid)
    return signal.with_samples(out[0])
