"""Assemble channel, filter bank, step plan and engine from one configuration."""

import dataclasses
import logging
from dataclasses import dataclass

import numpy as np

from ..channel.fiber import FiberParams, StepGrid, log_step_grid, uniform_step_grid
from ..channel.ssfm import ssfm_propagate
from ..config.settings import ExperimentConfig
from ..dbp.layout import EngineLayout, build_layout
from ..dbp.params import DbpParams, init_dbp_params
from ..dbp.planning import StepPlan, compute_delta, plan_steps
from ..dbp.receiver import SubbandDbpReceiver, dispersion_memory, extend_periodic
from ..filterbank.bank import FilterBankSpec, make_filter_bank
from ..training.loss import BatchItem, LossGraph
from ..training.pretrain import pretrain_cd
from ..utils.enums import GridScheme
from ..waveform.pulse import pulse_shape, rrc_taps
from ..waveform.resample import resample_fft
from ..waveform.symbols import generate_symbols
from ..waveform.types import ComplexSignal, SymbolSequence

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ExperimentSystem:
    """Static objects shared by data generation, training and evaluation."""

    config: ExperimentConfig
    fiber: FiberParams
    grid: StepGrid
    bank: FilterBankSpec
    plan: StepPlan
    layout: EngineLayout
    pulse_taps: np.ndarray
    head: int
    tail: int

    @property
    def dbp_rate(self) -> float:
        return self.config.signal.baud_hz * self.config.signal.dbp_samples_per_symbol

    @property
    def cd_band(self) -> float:
        """In-band edge of the CD filters in cycles per subband sample."""
        if self.config.engine.cd_band is not None:
            return self.config.engine.cd_band
        fb = self.config.filter_bank
        return min(0.5, fb.downsample * (1.0 + fb.rolloff) / (2.0 * fb.n_subbands))

    def prepare(self, rx: ComplexSignal) -> ComplexSignal:
        """Periodically pad a DBP-rate record for the subband engine."""
        return extend_periodic(rx, self.head, self.tail)

    def initial_params(self, seed: int | None = None) -> DbpParams:
        """Pre-trained CD filters, bank prototypes, Lagrange delays and MIMO init."""
        engine = self.config.engine
        seed = self.config.training.seed if seed is None else seed
        cd_filters = pretrain_cd(
            list(self.layout.xi_km),
            self.fiber.beta2_ps2_per_km,
            engine.cd_half_length,
            self.bank.subband_rate_hz,
            self.cd_band,
            iterations=engine.cd_pretrain_iterations,
            lr=engine.cd_pretrain_lr,
            seed=seed,
        )
        return init_dbp_params(
            self.bank,
            self.layout,
            cd_filters,
            fiber=self.fiber,
            mimo_init=engine.mimo_init,
            seed=seed,
            p_ref_w=engine.p_ref_w,
            init_scale=engine.init_scale,
        )

    def loss_graph(self) -> LossGraph:
        return LossGraph(
            bank=self.bank,
            layout=self.layout,
            pulse_taps=self.pulse_taps,
            samples_per_symbol=self.config.signal.dbp_samples_per_symbol,
            guard=self.config.training.guard_symbols,
            l1_weight=self.config.training.l1_weight,
        )

    def batch_item(self, tx: SymbolSequence, rx: ComplexSignal) -> BatchItem:
        """Training item over the first ``sequence_symbols`` symbols of a record."""
        count = self.config.training.sequence_symbols
        cropped = SymbolSequence(symbols=tx.symbols[:count], baud=tx.baud, seed=tx.seed)
        return BatchItem(tx=cropped, rx=self.prepare(rx))

    def receiver(self, params: DbpParams) -> SubbandDbpReceiver:
        return SubbandDbpReceiver(bank=self.bank, layout=self.layout, params=params)

    def simulate(
        self, power_dbm: float, symbol_seed: int, noise_seed: int | None
    ) -> tuple[SymbolSequence, ComplexSignal]:
        """Transmit one record and return its symbols and the DBP-rate received field."""
        signal = self.config.signal
        spec = signal.spec(power_dbm, symbol_seed)
        symbols = generate_symbols(spec)
        taps = rrc_taps(signal.rolloff, signal.span_symbols, signal.samples_per_symbol)
        launched = pulse_shape(symbols, taps, signal.samples_per_symbol, power_dbm)
        received = ssfm_propagate(
            launched, self.fiber, self.grid, signal.samples_per_symbol, noise_seed
        )
        return symbols, resample_fft(received, self.dbp_rate)


def build_system(config: ExperimentConfig) -> ExperimentSystem:
    """Derive every static object of an experiment from ``config``."""
    sig, fb, eng = config.signal, config.filter_bank, config.engine
    fiber = config.fiber.params()
    fiber.validate()
    if config.fiber.grid is GridScheme.UNIFORM:
        grid = uniform_step_grid(fiber.span_km, config.fiber.steps_per_span)
    else:
        grid = log_step_grid(fiber.span_km, config.fiber.steps_per_span, fiber.alpha_db_per_km)

    dbp_rate = sig.baud_hz * sig.dbp_samples_per_symbol
    bank = make_filter_bank(
        fb.n_subbands,
        fb.downsample,
        fb.active_half_width,
        dbp_rate,
        fb.rolloff,
        fb.length,
        fb.tie_synthesis,
    )
    delta, _ = compute_delta(fb.n_subbands, fb.downsample, 1.0 / dbp_rate, fiber.beta2_ps2_per_km)
    plan = plan_steps(fiber.total_km, delta, eng.step_multiple)
    layout = build_layout(plan, bank, fiber.beta2_ps2_per_km, eng.n_factors, eng.frac_taps)

    bandwidth = sig.baud_hz * (1.0 + sig.rolloff)
    head = dispersion_memory(fiber, bandwidth, dbp_rate, multiple=sig.dbp_samples_per_symbol)
    system = ExperimentSystem(
        config=config,
        fiber=fiber,
        grid=grid,
        bank=bank,
        plan=plan,
        layout=layout,
        pulse_taps=rrc_taps(sig.rolloff, sig.span_symbols, sig.dbp_samples_per_symbol),
        head=head,
        tail=head + layout.t0_offset,
    )
    logger.info(
        "Experiment assembled",
        extra={
            "fields": {
                "delta_km": delta,
                "steps": plan.n_steps,
                "residual_km": plan.residual_km,
                "active": bank.n_active,
                "engine_delay": layout.t0_offset,
                "head": head,
            }
        },
    )
    return system


def micro_config() -> ExperimentConfig:
    """Tiny single-span configuration for self-tests and gradient checks."""
    config = ExperimentConfig()
    config.signal = dataclasses.replace(config.signal, n_symbols=64, span_symbols=16)
    config.fiber = dataclasses.replace(config.fiber, n_spans=1, steps_per_span=10)
    config.filter_bank = dataclasses.replace(
        config.filter_bank, n_subbands=4, downsample=2, active_half_width=1, length=33
    )
    config.engine = dataclasses.replace(
        config.engine, n_factors=1, cd_pretrain_iterations=10, frac_taps=4
    )
    config.training = dataclasses.replace(
        config.training,
        sequence_symbols=64,
        guard_symbols=8,
        batch_size=1,
        iterations=5,
        validate_every=0,
    )
    config.dataset = dataclasses.replace(config.dataset, records=2, validation_records=1)
    config.evaluation = dataclasses.replace(
        config.evaluation, guard_symbols=8, powers_dbm=[0.0], seed_count=1
    )
    config.validate()
    return config
