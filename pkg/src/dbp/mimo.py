"""Causal polynomial-matrix filtering of subband intensities.

A factor is a real array ``G`` of shape (R, R, order + 1) holding the matrix
coefficients of ``G(z) = sum_k G[:, :, k] z^-k``. A step applies its F factors in
sequence; their product is a polynomial matrix of order ``sum(order_f)``.
"""

import numpy as np

from ..utils.errors import EngineError


def poly_matrix_apply(
    coefficients: np.ndarray, a: np.ndarray, mask: np.ndarray | None = None
) -> np.ndarray:
    """Apply one causal polynomial matrix to the rows of ``a``.

    Args:
        coefficients: Real array (R, R, order + 1)
        a: Real input (R, n)
        mask: Optional boolean array like ``coefficients``; False entries are skipped

    Returns:
        ``b[:, n] = sum_k G[:, :, k] @ a[:, n - k]`` with zero history
    """
    n_rows, n_cols, n_lags = coefficients.shape
    if n_rows != n_cols or a.shape[0] != n_cols:
        raise EngineError(f"coefficients {coefficients.shape} do not match input rows {a.shape[0]}")
    if mask is not None:
        coefficients = np.where(mask, coefficients, 0.0)
    n = a.shape[-1]
    b = np.zeros((n_rows, n), dtype=np.result_type(coefficients, a))
    for k in range(min(n_lags, n)):
        tap = coefficients[:, :, k]
        # Fully pruned lags cost nothing.
        if not tap.any():
            continue
        b[:, k:] += tap @ a[:, : n - k]
    return b


def mimo_intensity_filter(
    factors: list[np.ndarray],
    a: np.ndarray,
    masks: list[np.ndarray] | None = None,
) -> np.ndarray:
    """Run the factor cascade of one step on intensities ``a``."""
    b = a
    for j, factor in enumerate(factors):
        b = poly_matrix_apply(factor, b, None if masks is None else masks[j])
    return b


def compose_factors(factors: list[np.ndarray], masks: list[np.ndarray] | None = None) -> np.ndarray:
    """Dense product ``G_F(z) ... G_1(z)`` of a factor cascade."""
    if not factors:
        raise EngineError("cannot compose an empty cascade")
    result = None
    for j, factor in enumerate(factors):
        if masks is not None:
            factor = np.where(masks[j], factor, 0.0)
        if result is None:
            result = factor.copy()
            continue
        order = result.shape[2] + factor.shape[2] - 1
        product = np.zeros(result.shape[:2] + (order,))
        for p in range(factor.shape[2]):
            for q in range(result.shape[2]):
                product[:, :, p + q] += factor[:, :, p] @ result[:, :, q]
        result = product
    return result


def factor_shape(n_active: int, order: int, n_factors: int) -> tuple[int, int, int]:
    if order % n_factors:
        raise EngineError(f"order {order} is not divisible by {n_factors} factors")
    return n_active, n_active, order // n_factors + 1


def mimo_capacity(n_active: int, orders: list[int], n_factors: int) -> int:
    """Total coefficient count sum_l F*R^2*(O_l/F + 1)."""
    return sum(
        n_factors * int(np.prod(factor_shape(n_active, order, n_factors))) for order in orders
    )


def mimo_real_multiplications(masks: list[np.ndarray]) -> int:
    """Nonzero coefficients of a step, i.e. real multiplications per output vector."""
    return int(sum(int(np.count_nonzero(m)) for m in masks))


def nonlinear_phase_rotate(u: np.ndarray, b: np.ndarray) -> np.ndarray:
    """``u * exp(j*b)`` with real phase drive ``b``."""
    return u * np.exp(1j * b)
