"""Unit tests for config loading."""
import dataclasses

import pytest
import yaml

from src.config.settings import (
    EngineConfig,
    ExperimentConfig,
    bundled_config,
    load_config,
)
from src.utils.enums import GridScheme, Method, MimoInit, Scale
from src.utils.errors import ConfigurationError


def _write(tmp_path, data, name="config.yaml"):
    path = tmp_path / name
    path.write_text(yaml.safe_dump(data))
    return path


class TestConfigLoading:
    """Test configuration loading."""

    def test_load_config_default(self):
        """Test loading the bundled desk config."""
        load_config.cache_clear()

        config = load_config()

        assert isinstance(config, ExperimentConfig)
        assert config.fiber.n_spans == 4
        assert config.fiber.grid is GridScheme.LOGARITHMIC
        assert config.engine.step_multiple == 1
        assert Method.SUBBAND_TDDBP in config.evaluation.methods

    def test_bundled_configs_train_sparse_and_refine_the_fd_reference(self):
        """Test both scales regularise the MIMO filters and step the FD reference finely."""
        for scale in Scale:
            config = load_config(bundled_config(scale))

            assert config.training.l1_weight > 0
            assert 0 < config.training.tau < 1
            fd_steps = config.evaluation.fd_steps_per_span
            assert fd_steps == config.evaluation.full_dbp_steps_per_span

    def test_load_paper_scale(self):
        """Test the long-haul config matches the published link."""
        config = load_config(bundled_config(Scale.PAPER))

        assert config.signal.baud_hz == 96e9
        assert config.fiber.n_spans == 25
        assert config.engine.step_multiple == 2

    def test_config_caching(self):
        """Test that config is cached."""
        load_config.cache_clear()

        config1 = load_config()
        config2 = load_config()

        # Should be the same object due to caching
        assert config1 is config2

    def test_missing_sections_use_defaults(self, tmp_path):
        """Test a partial file fills in every other section."""
        config = load_config(_write(tmp_path, {"fiber": {"n_spans": 2}}))

        assert config.fiber.n_spans == 2
        assert config.engine == EngineConfig()

    def test_enum_values_are_converted(self, tmp_path):
        """Test string values become enums."""
        data = {"fiber": {"grid": "uniform"}, "engine": {"mimo_init": "physics", "n_factors": 1}}
        config = load_config(_write(tmp_path, data))

        assert config.fiber.grid is GridScheme.UNIFORM
        assert config.engine.mimo_init is MimoInit.PHYSICS

    def test_round_trip_through_yaml(self, tmp_path):
        """Test to_dict output loads back to an equal config."""
        original = load_config()
        restored = load_config(_write(tmp_path, original.to_dict()))

        assert restored.digest() == original.digest()


class TestConfigValidation:
    """Test configuration validation."""

    def test_missing_file(self, tmp_path):
        """Test a missing file is a configuration error."""
        with pytest.raises(ConfigurationError, match="not found"):
            load_config(tmp_path / "absent.yaml")

    def test_unknown_key(self, tmp_path):
        """Test misspelled keys are rejected."""
        with pytest.raises(ConfigurationError, match="n_span"):
            load_config(_write(tmp_path, {"fiber": {"n_span": 2}}))

    def test_unknown_section(self, tmp_path):
        """Test unknown sections are rejected."""
        with pytest.raises(ConfigurationError, match="unknown sections"):
            load_config(_write(tmp_path, {"model": {}}))

    def test_bad_enum(self, tmp_path):
        """Test invalid enum values are rejected."""
        with pytest.raises(ConfigurationError):
            load_config(_write(tmp_path, {"evaluation": {"methods": ["magic"]}}))

    def test_downsample_below_subbands(self):
        """Test the bank must be oversampled."""
        config = ExperimentConfig()
        config.filter_bank = dataclasses.replace(config.filter_bank, downsample=12)

        with pytest.raises(ConfigurationError, match="downsample"):
            config.validate()

    def test_guard_fits_sequence(self):
        """Test training windows longer than their guards."""
        config = ExperimentConfig()
        config.training = dataclasses.replace(
            config.training, sequence_symbols=100, guard_symbols=50
        )

        with pytest.raises(ConfigurationError, match="guard"):
            config.validate()

    def test_defaults_are_valid(self):
        """Test default config passes validation."""
        ExperimentConfig().validate()

    def test_defaults_match_desk_file(self):
        """Test the dataclass defaults are the bundled desk values."""
        load_config.cache_clear()
        config = load_config()

        assert ExperimentConfig().training == config.training
        assert ExperimentConfig().evaluation == config.evaluation


class TestDigests:
    """Test configuration digests."""

    def test_digest_is_stable(self):
        """Test equal configs hash equally."""
        assert ExperimentConfig().digest() == ExperimentConfig().digest()
        assert len(ExperimentConfig().digest()) == 64

    def test_training_change_keeps_channel_digest(self):
        """Test training settings do not touch the channel digest."""
        base = ExperimentConfig()
        changed = ExperimentConfig()
        changed.training = dataclasses.replace(changed.training, lr=0.5)
        changed.dataset = dataclasses.replace(changed.dataset, seed=99, records=3)

        assert changed.digest() != base.digest()
        assert changed.channel_digest() == base.channel_digest()

    def test_fiber_change_changes_channel_digest(self):
        """Test link changes invalidate stored datasets."""
        base = ExperimentConfig()
        changed = ExperimentConfig()
        changed.fiber = dataclasses.replace(changed.fiber, gamma_per_w_km=1.0)

        assert changed.channel_digest() != base.channel_digest()

    def test_launch_power_changes_channel_digest(self):
        """Test dataset launch power is part of the channel."""
        changed = ExperimentConfig()
        changed.dataset = dataclasses.replace(changed.dataset, power_dbm=0.0)

        assert changed.channel_digest() != ExperimentConfig().channel_digest()
