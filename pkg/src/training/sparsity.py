"""Magnitude thresholding of the MIMO coefficients."""

import logging

import numpy as np

from ..dbp.params import DbpParams
from ..experiment.reports import SparsityReport

logger = logging.getLogger(__name__)


def sparsity_report(params: DbpParams, tau: float = 0.0) -> SparsityReport:
    nonzero = params.nonzero_per_step()
    total = int(sum(nonzero))
    capacity = int(sum(g.size for factors in params.mimo for g in factors))
    n_active = params.phase.size
    n_steps = max(params.n_steps, 1)
    return SparsityReport(
        tau=tau,
        nonzero_per_step=nonzero,
        total_nonzero=total,
        total_coefficients=capacity,
        mimo_rms=total / (n_active * n_steps),
    )


def threshold_sparsify(params: DbpParams, tau: float) -> tuple[DbpParams, SparsityReport]:
    """Zero every MIMO coefficient with ``|g| <= tau * max|g|`` over all steps.

    Pruned coefficients are removed from the masks so training keeps them at zero.
    ``tau = 0`` only drops coefficients that are already zero.
    """
    if tau < 0:
        raise ValueError(f"tau must be nonnegative, got {tau}")
    out = params.copy()
    live = [
        np.abs(g[m])
        for factors, masks in zip(out.mimo, out.mimo_masks)
        for g, m in zip(factors, masks)
    ]
    peak = max((float(v.max()) for v in live if v.size), default=0.0)
    level = tau * peak

    for step, (factors, masks) in enumerate(zip(out.mimo, out.mimo_masks)):
        for j, (g, m) in enumerate(zip(factors, masks)):
            keep = m & (np.abs(g) > level)
            out.mimo[step][j] = np.where(keep, g, 0.0)
            out.mimo_masks[step][j] = keep

    report = sparsity_report(out, tau)
    logger.info(
        "MIMO coefficients thresholded",
        extra={
            "fields": {
                "tau": tau,
                "nonzero": report.total_nonzero,
                "capacity": report.total_coefficients,
            }
        },
    )
    return out, report
