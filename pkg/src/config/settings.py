"""Configuration management for subband DBP experiments."""

import dataclasses
import functools
import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Optional

import yaml

from ..channel.fiber import FiberParams
from ..utils.enums import Constellation, GridScheme, Method, MimoInit, Scale
from ..utils.errors import ConfigurationError
from ..waveform.types import SignalSpec

CONFIG_DIR = Path(__file__).parent.parent.parent / "config"


@dataclass
class SignalConfig:
    """Transmitter configuration."""

    baud_hz: float = 32e9
    samples_per_symbol: int = 6
    dbp_samples_per_symbol: int = 2
    rolloff: float = 0.1
    n_symbols: int = 4096
    span_symbols: int = 64
    constellation: Constellation = Constellation.GAUSSIAN

    def spec(self, power_dbm: float, seed: int) -> SignalSpec:
        return SignalSpec(
            baud=self.baud_hz,
            oversampling=self.samples_per_symbol,
            rolloff=self.rolloff,
            power_dbm=power_dbm,
            n_symbols=self.n_symbols,
            seed=seed,
            constellation=self.constellation,
            span_symbols=self.span_symbols,
        )


@dataclass
class FiberConfig:
    """Link configuration."""

    alpha_db_per_km: float = 0.2
    beta2_ps2_per_km: float = -21.7
    gamma_per_w_km: float = 1.3
    span_km: float = 100.0
    n_spans: int = 4
    nf_db: float = 4.5
    carrier_hz: float = 193.41e12
    steps_per_span: int = 200
    grid: GridScheme = GridScheme.LOGARITHMIC

    def params(self) -> FiberParams:
        return FiberParams(
            alpha_db_per_km=self.alpha_db_per_km,
            beta2_ps2_per_km=self.beta2_ps2_per_km,
            gamma_per_w_km=self.gamma_per_w_km,
            span_km=self.span_km,
            n_spans=self.n_spans,
            nf_db=self.nf_db,
            carrier_hz=self.carrier_hz,
        )


@dataclass
class FilterBankConfig:
    """Analysis/synthesis bank configuration."""

    n_subbands: int = 12
    downsample: int = 8
    active_half_width: int = 3
    rolloff: float = 0.25
    length: int = 193
    tie_synthesis: bool = False


@dataclass
class EngineConfig:
    """Subband engine configuration."""

    step_multiple: int = 2
    n_factors: int = 3
    cd_half_length: int = 3
    cd_pretrain_iterations: int = 200
    cd_pretrain_lr: float = 1e-4
    cd_band: Optional[float] = None
    frac_taps: int = 8
    mimo_init: MimoInit = MimoInit.RANDOM
    init_scale: float = 1e-2
    p_ref_w: float = 1e-3


@dataclass
class TrainConfig:
    """Optimisation configuration."""

    iterations: int = 500
    batch_size: int = 4
    sequence_symbols: int = 4096
    guard_symbols: int = 64
    lr: float = 1e-3
    lr_decay: float = 0.5
    plateau_patience: int = 10
    min_lr: float = 1e-6
    l1_weight: float = 1e-4
    tau: float = 1e-3
    validate_every: int = 10
    seed: int = 0


@dataclass
class DatasetConfig:
    """Training data generation."""

    records: int = 50
    validation_records: int = 2
    power_dbm: float = 4.0
    seed: int = 1234
    noise: bool = True


@dataclass
class EvaluationConfig:
    """Launch-power sweep configuration."""

    powers_dbm: list[float] = field(default_factory=lambda: [-2.0, 0.0, 2.0, 4.0, 6.0])
    methods: list[Method] = field(default_factory=lambda: list(Method))
    seed_count: int = 2
    guard_symbols: int = 512
    full_dbp_steps_per_span: int = 50
    fd_steps_per_span: int = 50
    fd_fft_size: int = 128
    fd_memory: int = 13


@dataclass
class LoggingConfig:
    """Logging configuration."""

    level: str = "INFO"
    format: str = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"


@dataclass
class ExperimentConfig:
    """Main configuration class."""

    signal: SignalConfig = field(default_factory=SignalConfig)
    fiber: FiberConfig = field(default_factory=FiberConfig)
    filter_bank: FilterBankConfig = field(default_factory=FilterBankConfig)
    engine: EngineConfig = field(default_factory=EngineConfig)
    training: TrainConfig = field(default_factory=TrainConfig)
    dataset: DatasetConfig = field(default_factory=DatasetConfig)
    evaluation: EvaluationConfig = field(default_factory=EvaluationConfig)
    logging: LoggingConfig = field(default_factory=LoggingConfig)

    def validate(self) -> None:
        """Validate configuration.

        Raises:
            ConfigurationError: If configuration is invalid.
        """
        s, f, b, e, t = self.signal, self.fiber, self.filter_bank, self.engine, self.training
        if s.baud_hz <= 0:
            raise ConfigurationError("signal.baud_hz must be positive")
        if s.samples_per_symbol % s.dbp_samples_per_symbol:
            raise ConfigurationError(
                "signal.samples_per_symbol must be a multiple of dbp_samples_per_symbol"
            )
        if s.dbp_samples_per_symbol < 2:
            raise ConfigurationError("signal.dbp_samples_per_symbol must be at least 2")
        if not 0 <= s.rolloff <= 1:
            raise ConfigurationError("signal.rolloff must be between 0 and 1")
        if f.span_km <= 0 or f.n_spans < 1:
            raise ConfigurationError("fiber.span_km and fiber.n_spans must be positive")
        if f.beta2_ps2_per_km == 0:
            raise ConfigurationError("fiber.beta2_ps2_per_km must be nonzero")
        if f.steps_per_span < 1:
            raise ConfigurationError("fiber.steps_per_span must be at least 1")
        if b.n_subbands < 2 or b.downsample < 1 or b.downsample >= b.n_subbands:
            raise ConfigurationError("filter_bank needs 1 <= downsample < n_subbands")
        if not 0 <= b.active_half_width <= (b.n_subbands - 1) // 2:
            raise ConfigurationError("filter_bank.active_half_width exceeds the number of subbands")
        if e.step_multiple < 1 or e.n_factors < 1 or e.cd_half_length < 1:
            raise ConfigurationError(
                "engine.step_multiple, n_factors and cd_half_length must be positive"
            )
        if e.cd_band is not None and not 0 < e.cd_band <= 0.5:
            raise ConfigurationError("engine.cd_band must be in (0, 0.5]")
        if e.p_ref_w <= 0:
            raise ConfigurationError("engine.p_ref_w must be positive")
        if t.l1_weight < 0 or t.tau < 0:
            raise ConfigurationError("training.l1_weight and training.tau must be nonnegative")
        if t.lr < 0 or t.batch_size < 1 or t.iterations < 0:
            raise ConfigurationError("training.lr, batch_size and iterations are out of range")
        if t.sequence_symbols <= 2 * t.guard_symbols:
            raise ConfigurationError("training.sequence_symbols must exceed twice guard_symbols")
        if t.sequence_symbols > s.n_symbols:
            raise ConfigurationError("training.sequence_symbols cannot exceed signal.n_symbols")
        if self.dataset.records < 1:
            raise ConfigurationError("dataset.records must be positive")
        if self.evaluation.fd_fft_size <= self.evaluation.fd_memory:
            raise ConfigurationError("evaluation.fd_fft_size must exceed fd_memory")
        if s.n_symbols <= 2 * self.evaluation.guard_symbols:
            raise ConfigurationError("signal.n_symbols must exceed twice evaluation.guard_symbols")

    def to_dict(self) -> dict[str, Any]:
        return json.loads(json.dumps(dataclasses.asdict(self), default=_plain))

    def digest(self) -> str:
        """SHA-256 of every field."""
        return _hash(self.to_dict())

    def channel_digest(self) -> str:
        """SHA-256 of the fields that shape the received waveforms.

        Seeds and record counts are excluded.
        """
        data = self.to_dict()
        channel = {key: data["dataset"][key] for key in ("power_dbm", "noise")}
        return _hash({"signal": data["signal"], "fiber": data["fiber"], "channel": channel})


def _plain(value: Any) -> Any:
    if hasattr(value, "value"):
        return value.value
    raise TypeError(f"cannot serialise {type(value).__name__}")


def _hash(data: dict[str, Any]) -> str:
    canonical = json.dumps(data, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode()).hexdigest()


def _section(cls: type, raw: Any, name: str) -> Any:
    """Build one section dataclass from its YAML mapping, rejecting unknown keys."""
    if raw is None:
        raw = {}
    if not isinstance(raw, dict):
        raise ConfigurationError(f"section '{name}' must be a mapping")
    known = {f.name: f for f in dataclasses.fields(cls)}
    unknown = sorted(set(raw) - set(known))
    if unknown:
        raise ConfigurationError(f"unknown keys in '{name}': {', '.join(unknown)}")
    try:
        section = cls(**raw)
        for key in raw:
            value = getattr(section, key)
            kind = known[key].type
            if kind is Constellation or kind is GridScheme or kind is MimoInit:
                setattr(section, key, kind(value))
        if cls is EvaluationConfig:
            section.methods = [Method(m) for m in section.methods]
            section.powers_dbm = [float(p) for p in section.powers_dbm]
    except (TypeError, ValueError) as e:
        raise ConfigurationError(f"invalid value in '{name}': {e}") from e
    return section


SECTIONS = {
    "signal": SignalConfig,
    "fiber": FiberConfig,
    "filter_bank": FilterBankConfig,
    "engine": EngineConfig,
    "training": TrainConfig,
    "dataset": DatasetConfig,
    "evaluation": EvaluationConfig,
    "logging": LoggingConfig,
}


def bundled_config(scale: Scale = Scale.DESK) -> Path:
    return CONFIG_DIR / ("default.yaml" if Scale(scale) is Scale.DESK else "paper.yaml")


def _load_config_impl(config_file: Optional[Path] = None) -> ExperimentConfig:
    """Internal implementation of config loading.

    Use load_config() which is cached.
    """
    if config_file is None:
        config_file = bundled_config(Scale.DESK)

    if not config_file.exists():
        raise ConfigurationError(f"config file not found: {config_file}")
    try:
        with open(config_file, "r") as f:
            yaml_config: dict[str, Any] = yaml.safe_load(f) or {}
    except yaml.YAMLError as e:
        raise ConfigurationError(f"cannot parse {config_file}: {e}") from e
    if not isinstance(yaml_config, dict):
        raise ConfigurationError(f"{config_file} must contain a mapping of sections")

    unknown = sorted(set(yaml_config) - set(SECTIONS))
    if unknown:
        raise ConfigurationError(f"unknown sections: {', '.join(unknown)}")

    config = ExperimentConfig(
        **{name: _section(cls, yaml_config.get(name), name) for name, cls in SECTIONS.items()}
    )
    config.validate()
    return config


@functools.lru_cache(maxsize=4)
def load_config(config_file: Optional[Path] = None) -> ExperimentConfig:
    """Load configuration from a YAML file.

    This function is cached per path; callers must not mutate the result.

    Args:
        config_file: Path to YAML config file. Defaults to config/default.yaml

    Returns:
        ExperimentConfig instance

    Raises:
        ConfigurationError: If the file is missing or the configuration is invalid
    """
    return _load_config_impl(config_file)
