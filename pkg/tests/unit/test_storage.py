"""Unit tests for the binary container, datasets and checkpoints."""

import numpy as np
import pytest

from src.experiment.checkpoint import load_checkpoint, save_checkpoint
from src.experiment.container import (
    MAGIC,
    Container,
    decode,
    encode,
    read_container,
    write_container,
)
from src.experiment.dataset import generate_dataset, load_dataset, record_seeds, save_dataset
from src.utils.errors import ContainerError


@pytest.fixture
def container():
    return Container(
        digest="d" * 64,
        kind="dataset",
        arrays={
            "a": np.arange(6, dtype=np.complex128).reshape(2, 3),
            "mask": np.array([True, False]),
        },
        meta={"note": "x", "count": 2},
    )


class TestContainer:
    """Test container encoding and file handling."""

    def test_decode_restores_arrays(self, container):
        restored = decode(encode(container))
        assert restored.digest == container.digest
        assert restored.meta == container.meta
        np.testing.assert_array_equal(restored.arrays["a"], container.arrays["a"])
        assert restored.arrays["mask"].dtype == bool

    def test_encoding_is_deterministic(self, container):
        assert encode(container) == encode(container)
        assert encode(container).startswith(MAGIC)

    def test_bad_magic(self, container):
        payload = b"XXXX" + encode(container)[4:]
        with pytest.raises(ContainerError, match="magic"):
            decode(payload)

    def test_truncated(self, container):
        with pytest.raises(ContainerError, match="truncated"):
            decode(encode(container)[:-8])
        with pytest.raises(ContainerError, match="too short"):
            decode(b"SB")

    def test_refuses_overwrite_without_force(self, container, tmp_path):
        path = tmp_path / "out" / "data.sbd"
        write_container(path, container)
        with pytest.raises(ContainerError, match="--force"):
            write_container(path, container)
        write_container(path, container, force=True)
        assert not (path.parent / ".data.sbd.tmp").exists()

    def test_kind_check(self, container, tmp_path):
        path = write_container(tmp_path / "data.sbd", container)
        with pytest.raises(ContainerError, match="expected a checkpoint"):
            read_container(path, "checkpoint")

    def test_missing_file(self, tmp_path):
        with pytest.raises(ContainerError):
            read_container(tmp_path / "absent.sbd")


class TestDataset:
    """Test dataset generation and persistence."""

    def test_seeds_are_reproducible(self):
        assert record_seeds(3, 4) == record_seeds(3, 4)
        assert len(set(record_seeds(3, 4))) == 4
        assert record_seeds(3, 2) == record_seeds(3, 4)[:2]

    def test_same_seed_gives_identical_files(self, micro_system, tmp_path):
        first = save_dataset(tmp_path / "a.sbd", generate_dataset(micro_system, records=2, seed=5))
        threaded = generate_dataset(micro_system, records=2, seed=5, threads=2)
        second = save_dataset(tmp_path / "b.sbd", threaded)
        assert first.read_bytes() == second.read_bytes()

    def test_round_trip(self, micro_system, tmp_path):
        dataset = generate_dataset(micro_system, records=2, seed=5)
        loaded = load_dataset(save_dataset(tmp_path / "data.sbd", dataset))
        assert loaded.digest == micro_system.config.channel_digest()
        assert len(loaded) == 2
        for original, restored in zip(dataset.records, loaded.records):
            np.testing.assert_array_equal(restored.rx.samples, original.rx.samples)
            np.testing.assert_array_equal(restored.tx.symbols, original.tx.symbols)
            assert restored.rx.sample_rate == micro_system.dbp_rate
            assert restored.noise_seed == original.noise_seed

    def test_split(self, micro_system):
        dataset = generate_dataset(micro_system, records=2, seed=5)
        train, validation = dataset.split(1)
        assert len(train) == len(validation) == 1
        assert train[0] is dataset.records[0]
        assert validation[0] is dataset.records[1]
        with pytest.raises(ContainerError):
            dataset.split(2)


class TestCheckpoint:
    """Test checkpoint persistence."""

    def test_round_trip(self, micro_params, tmp_path):
        params = micro_params.copy()
        params.mimo_masks[0][0][0, 0, 0] = False
        path = save_checkpoint(
            tmp_path / "checkpoint.sbd", params, "c" * 64, meta={"config_digest": "e" * 64}
        )
        loaded, container = load_checkpoint(path)
        assert container.digest == "c" * 64
        assert container.meta["config_digest"] == "e" * 64
        assert loaded.p_ref_w == params.p_ref_w
        assert not loaded.mimo_masks[0][0][0, 0, 0]
        for a, b in zip(loaded.cd_half_taps, params.cd_half_taps):
            np.testing.assert_array_equal(a, b)
        np.testing.assert_array_equal(loaded.frac_taps, params.frac_taps)
        np.testing.assert_array_equal(loaded.phase, params.phase)

    def test_dataset_is_not_a_checkpoint(self, container, tmp_path):
        path = write_container(tmp_path / "data.sbd", container)
        with pytest.raises(ContainerError):
            load_checkpoint(path)
