"""Forward-simulated training and evaluation records."""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

from ..utils.errors import ContainerError
from ..waveform.types import ComplexSignal, SymbolSequence
from .container import Container, read_container, write_container
from .pipeline import ExperimentSystem

logger = logging.getLogger(__name__)

DATASET_KIND = "dataset"


@dataclass(frozen=True)
class Record:
    """Transmitted symbols and the received field at the DBP rate."""

    tx: SymbolSequence
    rx: ComplexSignal
    power_dbm: float
    symbol_seed: int
    noise_seed: int | None


@dataclass
class Dataset:
    records: list[Record]
    digest: str
    meta: dict[str, Any] = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.records)

    def split(self, validation: int) -> tuple[list[Record], list[Record]]:
        """Training and validation records; validation is taken from the end."""
        if validation <= 0:
            return list(self.records), []
        if validation >= len(self.records):
            raise ContainerError(f"cannot hold out {validation} of {len(self.records)} records")
        return self.records[:-validation], self.records[-validation:]


def record_seeds(seed: int, count: int) -> list[tuple[int, int]]:
    """Independent (symbol, noise) seed pairs derived from one root seed."""
    children = np.random.SeedSequence(seed).spawn(count)
    return [tuple(int(v) for v in child.generate_state(2, dtype=np.uint32)) for child in children]


def simulate_records(
    system: ExperimentSystem,
    count: int,
    power_dbm: float,
    seed: int,
    noise: bool = True,
    threads: int = 1,
) -> list[Record]:
    """Run ``count`` independent transmissions; the output depends only on the arguments."""

    def one(seeds: tuple[int, int]) -> Record:
        symbol_seed, noise_seed = seeds
        noise_seed = noise_seed if noise else None
        tx, rx = system.simulate(power_dbm, symbol_seed, noise_seed)
        return Record(
            tx=tx, rx=rx, power_dbm=power_dbm, symbol_seed=symbol_seed, noise_seed=noise_seed
        )

    seeds = record_seeds(seed, count)
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(one, seeds))
    return [one(s) for s in seeds]


def generate_dataset(
    system: ExperimentSystem,
    records: int | None = None,
    power_dbm: float | None = None,
    seed: int | None = None,
    threads: int = 1,
) -> Dataset:
    """Dataset described by the configuration's ``dataset`` section unless overridden."""
    cfg = system.config.dataset
    count = cfg.records if records is None else records
    power = cfg.power_dbm if power_dbm is None else power_dbm
    root = cfg.seed if seed is None else seed
    logger.info(
        "Generating dataset",
        extra={"fields": {"records": count, "power_dbm": power, "seed": root}},
    )
    items = simulate_records(system, count, power, root, cfg.noise, threads)
    return Dataset(
        records=items,
        digest=system.config.channel_digest(),
        meta={"power_dbm": power, "seed": root, "baud_hz": system.config.signal.baud_hz},
    )


def save_dataset(path: Path, dataset: Dataset, force: bool = False) -> Path:
    arrays: dict[str, np.ndarray] = {}
    for k, record in enumerate(dataset.records):
        arrays[f"tx/{k}"] = record.tx.symbols
        arrays[f"rx/{k}"] = record.rx.samples
    meta = dict(dataset.meta)
    meta["records"] = [
        {
            "power_dbm": r.power_dbm,
            "symbol_seed": r.symbol_seed,
            "noise_seed": r.noise_seed,
            "sample_rate": r.rx.sample_rate,
            "baud": r.tx.baud,
        }
        for r in dataset.records
    ]
    container = Container(digest=dataset.digest, kind=DATASET_KIND, arrays=arrays, meta=meta)
    return write_container(path, container, force)


def load_dataset(path: Path) -> Dataset:
    container = read_container(path, DATASET_KIND)
    records = []
    for k, info in enumerate(container.meta.get("records", [])):
        try:
            tx, rx = container.arrays[f"tx/{k}"], container.arrays[f"rx/{k}"]
        except KeyError as e:
            raise ContainerError(f"{path} is missing record {k}") from e
        records.append(
            Record(
                tx=SymbolSequence(symbols=tx, baud=info["baud"], seed=info["symbol_seed"]),
                rx=ComplexSignal(samples=rx, sample_rate=info["sample_rate"]),
                power_dbm=info["power_dbm"],
                symbol_seed=info["symbol_seed"],
                noise_seed=info["noise_seed"],
            )
        )
    meta = {k: v for k, v in container.meta.items() if k != "records"}
    return Dataset(records=records, digest=container.digest, meta=meta)
