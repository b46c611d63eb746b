"""Launch-power sweep comparing receiver methods."""

import csv
import logging
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ..channel.linear import linear_equalize
from ..channel.ssfm import full_dbp_baseline
from ..dbp.baselines import fd_subband_dbp_baseline
from ..dbp.params import DbpParams
from ..dbp.receiver import detect_symbols
from ..filterbank.bank import FilterBankSpec, analyze, make_filter_bank, synthesize
from ..utils.enums import Method
from ..waveform.metrics import align_and_snr
from ..waveform.types import ComplexSignal, SymbolSequence
from .dataset import simulate_records
from .pipeline import ExperimentSystem

logger = logging.getLogger(__name__)

RESULT_COLUMNS = ("power_dbm", "method", "snr_db", "seed_count")


@dataclass(frozen=True)
class ResultRow:
    power_dbm: float
    method: Method
    snr_db: float
    seed_count: int


def fd_bank(system: ExperimentSystem) -> FilterBankSpec:
    """Undecimated bank for the frequency-domain subband baseline."""
    fb = system.config.filter_bank
    return make_filter_bank(
        fb.n_subbands, 1, fb.active_half_width, system.dbp_rate, fb.rolloff, fb.length
    )


def equalize(
    system: ExperimentSystem,
    method: Method,
    rx: ComplexSignal,
    params: DbpParams | None,
    bank: FilterBankSpec | None = None,
) -> ComplexSignal:
    """Waveform after ``method``; ``rx`` is an unpadded DBP-rate record."""
    evaluation = system.config.evaluation
    if method is Method.LINEAR:
        return linear_equalize(rx, system.fiber)
    if method is Method.FULL_DBP:
        sps = system.config.signal.dbp_samples_per_symbol
        return full_dbp_baseline(rx, system.fiber, evaluation.full_dbp_steps_per_span, sps)
    if method is Method.FD_SUBBAND:
        bank = fd_bank(system) if bank is None else bank
        subbands = fd_subband_dbp_baseline(
            analyze(rx, bank), bank, system.fiber, evaluation.fd_steps_per_span
        )
        return synthesize(subbands, bank)
    if params is None:
        raise ValueError("subband TD-DBP needs trained parameters")
    return system.receiver(params).process(system.prepare(rx))


def method_snr(
    system: ExperimentSystem,
    method: Method,
    tx: SymbolSequence,
    rx: ComplexSignal,
    params: DbpParams | None,
    bank: FilterBankSpec | None = None,
) -> float:
    out = equalize(system, method, rx, params, bank)
    sps = system.config.signal.dbp_samples_per_symbol
    detected = detect_symbols(out, system.pulse_taps, sps, len(tx))
    return align_and_snr(tx, detected, system.config.evaluation.guard_symbols)


def evaluate_methods(
    system: ExperimentSystem,
    params: DbpParams | None,
    powers_dbm: list[float] | None = None,
    methods: list[Method] | None = None,
    seed: int = 0,
    threads: int = 1,
) -> list[ResultRow]:
    """Mean SNR of every method at every launch power.

    Each power uses ``seed_count`` fresh records; every method sees the same records.
    """
    evaluation = system.config.evaluation
    powers = evaluation.powers_dbm if powers_dbm is None else powers_dbm
    methods = evaluation.methods if methods is None else [Method(m) for m in methods]
    bank = fd_bank(system) if Method.FD_SUBBAND in methods else None

    rows = []
    for k, power in enumerate(powers):
        noise = system.config.dataset.noise
        records = simulate_records(
            system, evaluation.seed_count, power, seed * 1000 + k, noise, threads
        )
        for method in methods:
            snrs = [method_snr(system, method, r.tx, r.rx, params, bank) for r in records]
            snr = float(np.mean(snrs))
            rows.append(
                ResultRow(power_dbm=power, method=method, snr_db=snr, seed_count=len(records))
            )
            logger.info(
                "Evaluated",
                extra={"fields": {"power_dbm": power, "method": method.value, "snr_db": snr}},
            )
    return rows


def write_results_csv(rows: list[ResultRow], path: Path) -> Path:
    with open(path, "w", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(RESULT_COLUMNS)
        for row in sorted(rows, key=lambda r: (r.power_dbm, r.method.value)):
            writer.writerow(
                [repr(row.power_dbm), row.method.value, f"{row.snr_db:.4f}", row.seed_count]
            )
    return path


def plot_results(rows: list[ResultRow], path: Path) -> Path:
    """SNR versus launch power, one line per method."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(6, 4))
    for method in sorted({r.method for r in rows}, key=lambda m: m.value):
        points = sorted((r.power_dbm, r.snr_db) for r in rows if r.method is method)
        ax.plot([p for p, _ in points], [s for _, s in points], marker="o", label=method.value)
    ax.set_xlabel("launch power [dBm]")
    ax.set_ylabel("SNR [dB]")
    ax.grid(True, alpha=0.3)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path
