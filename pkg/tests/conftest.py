"""Pytest configuration and fixtures."""

import numpy as np
import pytest
import yaml

from src.experiment.pipeline import build_system, micro_config
from src.waveform.pulse import pulse_shape, rrc_taps
from src.waveform.symbols import generate_symbols
from src.waveform.types import SignalSpec


def pytest_addoption(parser):
    parser.addoption(
        "--runslow", action="store_true", default=False, help="run slow acceptance tests"
    )


def pytest_collection_modifyitems(config, items):
    if config.getoption("--runslow"):
        return
    skip_slow = pytest.mark.skip(reason="needs --runslow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)


@pytest.fixture
def rng():
    """Seeded generator; every test gets a fresh one."""
    return np.random.default_rng(20240611)


@pytest.fixture(scope="session")
def micro_system():
    """Single-span, three-subband system small enough for gradient checks."""
    return build_system(micro_config())


@pytest.fixture(scope="session")
def micro_params(micro_system):
    return micro_system.initial_params()


@pytest.fixture(scope="session")
def micro_record(micro_system):
    """Noiseless (tx, rx) record of the micro system at 0 dBm."""
    return micro_system.simulate(0.0, symbol_seed=11, noise_seed=None)


@pytest.fixture
def shaped_signal():
    """RRC-shaped Gaussian symbols at 2 samples per symbol, 0 dBm."""
    spec = SignalSpec(baud=32e9, oversampling=2, n_symbols=1024, seed=7, span_symbols=32)
    taps = rrc_taps(spec.rolloff, spec.span_symbols, spec.oversampling)
    symbols = generate_symbols(spec)
    return symbols, pulse_shape(symbols, taps, spec.oversampling, 0.0), taps


@pytest.fixture
def micro_config_file(tmp_path):
    """The micro configuration written out as YAML for command-line runs."""
    path = tmp_path / "micro.yaml"
    path.write_text(yaml.safe_dump(micro_config().to_dict(), sort_keys=False))
    return path
