"""Real-multiplication accounting for the subband engine and its FD counterpart."""

import logging
import math

from ..dbp.layout import EngineLayout
from ..dbp.params import DbpParams
from ..utils.errors import EngineError
from .reports import RmReport, StepCost

logger = logging.getLogger(__name__)

DEFAULT_FD_MEMORY = 13


def rm_report_from_counts(
    n_active: int,
    half_length: int,
    nonzero_per_step: list[int],
    xi_km: list[float] | None = None,
) -> RmReport:
    """RMs per subband and step from MIMO nonzero counts.

    CD filters cost 4(L+1) RMs. MIMO cost is the step's nonzero coefficient
    count divided by the number of active subbands.
    """
    if n_active < 1:
        raise EngineError("at least one active subband is required")
    n_steps = len(nonzero_per_step)
    if xi_km is None:
        xi_km = [0.0] * n_steps
    cd = 4.0 * (half_length + 1)
    steps = [
        StepCost(step=step, xi_km=xi, nonzero=count, cd_rms=cd, mimo_rms=count / n_active)
        for step, (count, xi) in enumerate(zip(nonzero_per_step, xi_km))
    ]
    total = int(sum(nonzero_per_step))
    return RmReport(
        n_active=n_active,
        n_steps=n_steps,
        half_length=half_length,
        steps=steps,
        total_nonzero=total,
        cd_rms=cd,
        mimo_rms=total / (n_active * n_steps) if n_steps else 0.0,
    )


def rm_report(params: DbpParams, layout: EngineLayout) -> RmReport:
    """Complexity of a trained parameter set."""
    params.check_layout(layout)
    half_lengths = {taps.size - 1 for taps in params.cd_half_taps}
    if len(half_lengths) > 1:
        raise EngineError(f"CD filters of different lengths: {sorted(half_lengths)}")
    report = rm_report_from_counts(
        layout.n_active,
        half_lengths.pop(),
        params.nonzero_per_step(),
        list(layout.xi_km),
    )
    logger.info(
        "Complexity",
        extra={
            "fields": {
                "cd_rms": report.cd_rms,
                "mimo_rms": report.mimo_rms,
                "total_rms": report.total_rms,
            }
        },
    )
    return report


def fd_baseline_rms(n: int, memory: int = DEFAULT_FD_MEMORY) -> float:
    """RMs per subband and step of overlap-and-add FD backpropagation.

    Evaluates 4(2n*log2(n) + 8n)/(n - memory) for FFT size ``n``.
    """
    if n <= memory:
        raise EngineError(f"FFT size {n} must exceed the memory {memory}")
    if n & (n - 1):
        raise EngineError(f"FFT size {n} is not a power of two")
    return 4.0 * (2.0 * n * math.log2(n) + 8.0 * n) / (n - memory)


def optimal_fft_size(memory: int = DEFAULT_FD_MEMORY, max_exponent: int = 12) -> int:
    """Power-of-two FFT size minimising :func:`fd_baseline_rms`."""
    sizes = [2**e for e in range(1, max_exponent + 1) if 2**e > memory]
    return min(sizes, key=lambda n: fd_baseline_rms(n, memory))


def with_fd_baseline(
    report: RmReport, n: int | None = None, memory: int = DEFAULT_FD_MEMORY
) -> RmReport:
    """Attach the FD comparison row; ``n=None`` picks the optimal FFT size."""
    size = optimal_fft_size(memory) if n is None else n
    return report.model_copy(update={"fd_fft_size": size, "fd_rms": fd_baseline_rms(size, memory)})
