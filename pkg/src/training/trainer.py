"""Mini-batch optimisation of the subband engine."""

import csv
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from ..autodiff.tape import Tape
from ..config.settings import TrainConfig
from ..dbp.params import DbpParams
from ..dbp.receiver import SubbandDbpReceiver
from ..utils.errors import DigestMismatchError, TapeError
from ..waveform.metrics import align_and_snr
from .adam import AdamState, PlateauSchedule, adam_step
from .loss import BatchItem, LossGraph, backward, forward_loss, record_l1, record_leaves
from .param_vector import ParamLayout

logger = logging.getLogger(__name__)

CURVE_COLUMNS = ("iteration", "loss", "mse", "l1", "val_snr_db", "lr")


@dataclass
class TrainingCurves:
    """Per-iteration loss and validation history."""

    rows: list[dict[str, float | int | str]] = field(default_factory=list)

    def append(
        self,
        iteration: int,
        loss: float,
        mse: float,
        l1: float,
        lr: float,
        val_snr_db: float | None,
    ) -> None:
        self.rows.append(
            {
                "iteration": iteration,
                "loss": loss,
                "mse": mse,
                "l1": l1,
                "val_snr_db": "" if val_snr_db is None else val_snr_db,
                "lr": lr,
            }
        )

    def column(self, name: str) -> list:
        return [row[name] for row in self.rows]

    def write_csv(self, path: Path) -> Path:
        with open(path, "w", newline="") as f:
            writer = csv.DictWriter(f, fieldnames=CURVE_COLUMNS, lineterminator="\n")
            writer.writeheader()
            for row in self.rows:
                writer.writerow(
                    {k: (repr(v) if isinstance(v, float) else v) for k, v in row.items()}
                )
        return path


def check_digest(found: str | None, expected: str | None, allow_mismatch: bool = False) -> None:
    """Refuse artifacts produced under a different configuration.

    Raises:
        DigestMismatchError: If both digests are known, differ and no override is given
    """
    if found is None or expected is None or found == expected:
        return
    if allow_mismatch:
        logger.warning(
            "Digest mismatch overridden",
            extra={"fields": {"found": found[:12], "expected": expected[:12]}},
        )
        return
    raise DigestMismatchError(
        f"artifact digest {found[:12]} does not match configuration digest {expected[:12]}"
    )


def item_gradient(
    graph: LossGraph, params: DbpParams, layout: ParamLayout, item: BatchItem
) -> tuple[float, np.ndarray]:
    """Aligned MSE of one item and its flat gradient."""
    result = forward_loss(replace(graph, l1_weight=0.0), params, [item])
    return result.mse, backward(result, layout)


def l1_gradient(params: DbpParams, layout: ParamLayout) -> tuple[float, np.ndarray]:
    tape = Tape()
    leaves = record_leaves(tape, params)
    total = record_l1(params, leaves)
    if total is None:
        return 0.0, np.zeros(layout.size)
    return float(total.value), layout.flatten_arrays(tape.backward(total))


def batch_gradient(
    graph: LossGraph,
    params: DbpParams,
    layout: ParamLayout,
    batch: list[BatchItem],
    executor: ThreadPoolExecutor | None = None,
) -> tuple[float, float, float, np.ndarray]:
    """Loss, MSE, L1 norm and gradient of a batch.

    Per-item gradients are reduced in batch order, so the result does not
    depend on the number of workers.
    """
    if not batch:
        raise TapeError("batch is empty")
    if executor is None:
        results = [item_gradient(graph, params, layout, item) for item in batch]
    else:
        # map preserves input order.
        results = list(executor.map(lambda item: item_gradient(graph, params, layout, item), batch))
    mse = 0.0
    grad = np.zeros(layout.size)
    for value, g in results:
        mse += value
        grad += g
    mse /= len(batch)
    grad /= len(batch)

    l1, l1_grad = l1_gradient(params, layout)
    if graph.l1_weight > 0:
        grad = grad + graph.l1_weight * l1_grad
    return mse + graph.l1_weight * l1, mse, l1, grad


def validation_snr(graph: LossGraph, params: DbpParams, items: list[BatchItem]) -> float:
    """Mean SNR in dB of the engine over ``items``."""
    receiver = SubbandDbpReceiver(bank=graph.bank, layout=graph.layout, params=params)
    values = []
    for item in items:
        detected = receiver.detect(
            item.rx, graph.pulse_taps, graph.samples_per_symbol, len(item.tx)
        )
        values.append(align_and_snr(item.tx, detected, graph.guard))
    return float(np.mean(values))


def train(
    config: TrainConfig,
    items: list[BatchItem],
    init: DbpParams,
    graph: LossGraph,
    validation: list[BatchItem] | None = None,
    threads: int = 1,
    dataset_digest: str | None = None,
    expected_digest: str | None = None,
    allow_digest_mismatch: bool = False,
) -> tuple[DbpParams, TrainingCurves]:
    """Optimise ``init`` with Adam on mini-batches drawn from ``items``.

    Args:
        config: Optimisation settings
        items: Training records
        init: Initial parameters; not modified
        graph: Static structure of the unrolled receiver; its ``l1_weight`` is
            replaced by ``config.l1_weight``
        validation: Records for the periodic SNR readout
        threads: Workers evaluating per-item gradients
        dataset_digest: Channel digest stored with ``items``
        expected_digest: Channel digest of the active configuration
        allow_digest_mismatch: Train even if the digests differ

    Returns:
        (trained parameters, training curves)

    Raises:
        DigestMismatchError: If the dataset was generated under another channel configuration
    """
    check_digest(dataset_digest, expected_digest, allow_digest_mismatch)
    if not items:
        raise TapeError("no training items")
    graph = replace(graph, l1_weight=config.l1_weight)
    layout = ParamLayout.from_params(init)
    params = init.copy()
    flat = layout.flatten(params)
    mask = layout.trainable_mask(params)
    state = AdamState.zeros(layout.size, lr=config.lr)
    schedule = PlateauSchedule(
        patience=config.plateau_patience, factor=config.lr_decay, min_lr=config.min_lr
    )
    rng = np.random.default_rng(config.seed)
    curves = TrainingCurves()
    batch_size = min(config.batch_size, len(items))

    executor = ThreadPoolExecutor(max_workers=threads) if threads > 1 else None
    try:
        for iteration in range(config.iterations):
            picks = np.sort(rng.choice(len(items), size=batch_size, replace=False))
            batch = [items[i] for i in picks]
            loss, mse, l1, grad = batch_gradient(graph, params, layout, batch, executor)
            grad = np.where(mask, grad, 0.0)

            state, flat = adam_step(state, flat, grad)
            # Pruned MIMO coefficients stay exactly zero.
            flat = np.where(mask, flat, 0.0) if not mask.all() else flat
            params = layout.unflatten(flat, params)

            val = None
            due = config.validate_every > 0 and (iteration + 1) % config.validate_every == 0
            if validation and due:
                val = validation_snr(graph, params, validation)
            curves.append(iteration, loss, mse, l1, state.lr, val)
            state = replace(state, lr=schedule.update(loss, state.lr))

            logger.debug(
                "Training iteration",
                extra={
                    "fields": {
                        "iteration": iteration,
                        "loss": loss,
                        "mse": mse,
                        "l1": l1,
                        "lr": state.lr,
                    }
                },
            )
            if val is not None:
                logger.info("Validation", extra={"fields": {"iteration": iteration, "snr_db": val}})
    finally:
        if executor is not None:
            executor.shutdown()

    return params, curves
