"""Fast oracle and property checks runnable from the command line."""

import logging
from dataclasses import dataclass
from typing import Callable

import numpy as np

from ..dbp.cd_filter import apply_cd, unfold_taps
from ..dbp.mimo import compose_factors, mimo_capacity, mimo_intensity_filter, poly_matrix_apply
from ..dbp.planning import compute_delta, plan_steps
from ..filterbank.bank import analyze, make_filter_bank, synthesize
from ..training.gradcheck import finite_difference_check
from ..waveform.metrics import align_and_snr
from ..waveform.pulse import matched_filter_downsample, pulse_shape, rrc_taps
from ..waveform.symbols import generate_symbols
from ..waveform.types import SignalSpec
from .complexity import fd_baseline_rms, optimal_fft_size, rm_report_from_counts
from .pipeline import build_system, micro_config

logger = logging.getLogger(__name__)

GRADIENT_TOLERANCE = 1e-4
RECONSTRUCTION_DB = 40.0


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str


def check_delta_lock() -> CheckResult:
    delta, _ = compute_delta(12, 8, 1.0 / 192e9, -21.7)
    plan = plan_steps(2500.0, delta, 2)
    ok = (
        abs(delta - 19.1) < 0.05
        and plan.n_steps == 66
        and len(plan.steps) == 65
        and abs(plan.residual_km - 17.0) < 0.5
    )
    detail = f"delta={delta:.3f} km, steps={plan.n_steps}, residual={plan.residual_km:.2f} km"
    return CheckResult("delta lock", ok, detail)


def check_complexity() -> CheckResult:
    capacity = mimo_capacity(7, [12] * 66, 3)
    report = rm_report_from_counts(7, 3, [3812] + [0] * 65)
    fd = fd_baseline_rms(128)
    ok = (
        capacity == 48510
        and abs(report.total_rms - 24.25) < 0.01
        and abs(fd - 98) < 1
        and optimal_fft_size() == 128
    )
    return CheckResult(
        "complexity", ok, f"capacity={capacity}, td={report.total_rms:.2f} RMs, fd={fd:.2f} RMs"
    )


def check_folded_cd(rng: np.random.Generator) -> CheckResult:
    x = rng.standard_normal(256) + 1j * rng.standard_normal(256)
    half = rng.standard_normal(4) + 1j * rng.standard_normal(4)
    direct = np.convolve(x, unfold_taps(half))[3 : 3 + x.size]
    error = float(np.sqrt(np.mean(np.abs(apply_cd(x, half) - direct) ** 2)))
    return CheckResult("folded CD", error < 1e-12, f"rms={error:.2e}")


def check_mimo_cascade(rng: np.random.Generator) -> CheckResult:
    factors = [rng.standard_normal((3, 3, 3)) for _ in range(3)]
    a = rng.standard_normal((3, 128))
    cascaded = mimo_intensity_filter(factors, a)
    composed = poly_matrix_apply(compose_factors(factors), a)
    error = float(np.sqrt(np.mean((cascaded - composed) ** 2)))
    return CheckResult("MIMO cascade", error < 1e-10, f"rms={error:.2e}")


def check_reconstruction() -> CheckResult:
    spec = SignalSpec(baud=32e9, oversampling=2, n_symbols=2048, seed=3)
    taps = rrc_taps(spec.rolloff, spec.span_symbols, spec.oversampling)
    signal = pulse_shape(generate_symbols(spec), taps, spec.oversampling, 0.0)
    bank = make_filter_bank(12, 8, 3, signal.sample_rate)
    rebuilt = synthesize(analyze(signal, bank), bank)
    reference = matched_filter_downsample(signal, taps, spec.oversampling, 0)
    detected = matched_filter_downsample(rebuilt, taps, spec.oversampling, 0)
    snr = align_and_snr(reference, detected, guard=256)
    return CheckResult("filter-bank reconstruction", snr >= RECONSTRUCTION_DB, f"snr={snr:.1f} dB")


def check_gradients() -> CheckResult:
    system = build_system(micro_config())
    params = system.initial_params()
    tx, rx = system.simulate(0.0, symbol_seed=5, noise_seed=None)
    errors = finite_difference_check(system.loss_graph(), params, [system.batch_item(tx, rx)])
    worst = max(errors, key=errors.get)
    detail = f"worst={worst} ({errors[worst]:.1e})"
    return CheckResult("gradients", errors[worst] < GRADIENT_TOLERANCE, detail)


def run_selftest(seed: int = 0) -> list[CheckResult]:
    """Run every check; a check that raises counts as failed."""
    rng = np.random.default_rng(seed)
    checks: list[tuple[str, Callable[[], CheckResult]]] = [
        ("delta lock", check_delta_lock),
        ("complexity", check_complexity),
        ("folded CD", lambda: check_folded_cd(rng)),
        ("MIMO cascade", lambda: check_mimo_cascade(rng)),
        ("filter-bank reconstruction", check_reconstruction),
        ("gradients", check_gradients),
    ]
    results = []
    for name, check in checks:
        try:
            result = check()
        except Exception as e:
            logger.exception("Self-test check crashed", extra={"fields": {"check": name}})
            result = CheckResult(name, False, f"{type(e).__name__}: {e}")
        results.append(result)
    return results


def format_results(results: list[CheckResult]) -> str:
    width = max(len(r.name) for r in results)
    lines = [
        f"{'PASS' if r.passed else 'FAIL'}  {r.name.ljust(width)}  {r.detail}" for r in results
    ]
    return "\n".join(lines)
