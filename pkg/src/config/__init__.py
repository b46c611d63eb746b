"""Experiment configuration."""

from .settings import (
    DatasetConfig,
    EngineConfig,
    EvaluationConfig,
    ExperimentConfig,
    FiberConfig,
    FilterBankConfig,
    LoggingConfig,
    SignalConfig,
    TrainConfig,
    bundled_config,
    load_config,
)

__all__ = [
    "DatasetConfig",
    "EngineConfig",
    "EvaluationConfig",
    "ExperimentConfig",
    "FiberConfig",
    "FilterBankConfig",
    "LoggingConfig",
    "SignalConfig",
    "TrainConfig",
    "bundled_config",
    "load_config",
]
