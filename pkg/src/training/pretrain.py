"""Least-squares initialisation and joint refinement of the per-step CD filters."""

import logging

import numpy as np

from ..dbp.cd_filter import CdFilter, cosine_basis, ideal_cd_response, ls_cd_filter
from .adam import AdamState, adam_step

logger = logging.getLogger(__name__)

JITTER = 1e-4


def cascade_error(
    half_taps: list[np.ndarray],
    basis: np.ndarray,
    target: np.ndarray,
) -> tuple[float, list[np.ndarray]]:
    """Mean squared deviation of the cascade response from ``target`` and its gradients.

    Gradients follow the complex convention dE/dRe + j*dE/dIm per half tap.
    """
    responses = [basis @ c for c in half_taps]
    prefix = [np.ones_like(target)]
    for r in responses:
        prefix.append(prefix[-1] * r)
    suffix = [np.ones_like(target)]
    for r in reversed(responses):
        suffix.append(suffix[-1] * r)
    suffix = suffix[::-1]

    error = prefix[-1] - target
    n = target.size
    grads = []
    for step in range(len(half_taps)):
        others = prefix[step] * suffix[step + 1]
        grads.append(2.0 * basis.T @ (np.conj(others) * error) / n)
    return float(np.mean(np.abs(error) ** 2)), grads


def pretrain_cd(
    xi_km: list[float],
    beta2_ps2_per_km: float,
    half_length: int,
    sample_rate: float,
    band: float,
    iterations: int = 200,
    lr: float = 1e-3,
    out_of_band_weight: float = 0.0,
    seed: int = 0,
    n_points: int = 512,
) -> list[CdFilter]:
    """Per-step least-squares CD filters refined jointly against the total dispersion.

    Args:
        xi_km: Step distances
        beta2_ps2_per_km: Group velocity dispersion
        half_length: L of every filter
        sample_rate: Subband rate in Hz
        band: In-band edge in cycles/sample
        iterations: Adam iterations of the joint refinement; 0 returns the LS designs
        lr: Adam learning rate
        out_of_band_weight: Passed to the per-step LS design
        seed: Seed of the symmetry-breaking perturbation
        n_points: In-band frequency grid size

    Returns:
        One CdFilter per step; the cascade with the lowest error seen
    """
    designs = [
        ls_cd_filter(xi, beta2_ps2_per_km, half_length, sample_rate, band, out_of_band_weight)
        for xi in xi_km
    ]
    if iterations <= 0 or len(designs) < 2:
        return designs

    # Equal steps share one LS design; jitter breaks the tie.
    rng = np.random.default_rng(seed)
    taps = []
    for design in designs:
        c = design.half_taps
        scale = JITTER * np.max(np.abs(c))
        taps.append(c + scale * (rng.standard_normal(c.size) + 1j * rng.standard_normal(c.size)))

    freqs = np.linspace(0.0, band, n_points)
    basis = cosine_basis(freqs, half_length)
    target = ideal_cd_response(freqs, float(np.sum(xi_km)), beta2_ps2_per_km, sample_rate)

    # Adam runs on the interleaved real view of the complex taps.
    flat = np.concatenate(taps).view(np.float64).copy()
    state = AdamState.zeros(flat.size, lr=lr)
    best_error, best_flat = np.inf, flat.copy()
    initial_error = None
    for iteration in range(iterations + 1):
        current = flat.view(np.complex128).reshape(len(taps), half_length + 1)
        error, grads = cascade_error(list(current), basis, target)
        if initial_error is None:
            initial_error = error
        if error < best_error:
            best_error, best_flat = error, flat.copy()
        if iteration == iterations:
            break
        grad_flat = np.concatenate(grads).astype(np.complex128).view(np.float64)
        state, flat = adam_step(state, flat, grad_flat)

    logger.info(
        "CD cascade refined",
        extra={
            "fields": {
                "steps": len(taps),
                "initial_error": initial_error,
                "final_error": best_error,
            }
        },
    )
    best = best_flat.view(np.complex128).reshape(len(taps), half_length + 1)
    return [CdFilter(half_taps=best[i].copy(), xi_km=xi) for i, xi in enumerate(xi_km)]
