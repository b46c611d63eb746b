"""The unrolled receiver as a differentiable graph and its training loss.

The graph mirrors :class:`src.dbp.receiver.SubbandDbpReceiver` followed by
matched filtering and the phase/scale-aligned symbol MSE.
"""

from dataclasses import dataclass

import numpy as np

from ..autodiff import ops
from ..autodiff.tape import Tape, Var
from ..dbp.layout import EngineLayout
from ..dbp.params import DbpParams
from ..filterbank.bank import FilterBankSpec, modulation
from ..utils.errors import TapeError
from ..waveform.types import ComplexSignal, SymbolSequence
from .param_vector import (
    ANALYSIS,
    FRACTIONAL,
    PHASE,
    SYNTHESIS,
    ParamLayout,
    cd_name,
    mimo_name,
    named_arrays,
)


@dataclass(frozen=True)
class BatchItem:
    """Transmitted symbols and the prepared received waveform at the DBP rate."""

    tx: SymbolSequence
    rx: ComplexSignal


@dataclass(frozen=True)
class LossGraph:
    """Static structure of the unrolled receiver."""

    bank: FilterBankSpec
    layout: EngineLayout
    pulse_taps: np.ndarray
    samples_per_symbol: int
    guard: int
    l1_weight: float = 0.0


@dataclass
class ForwardResult:
    """Loss value, its parts and the tape that produced them."""

    loss: float
    mse: float
    l1: float
    tape: Tape
    output: Var


def record_leaves(tape: Tape, params: DbpParams) -> dict[str, Var]:
    return {name: tape.leaf(array, name) for name, array in named_arrays(params).items()}


def record_item(
    graph: LossGraph, params: DbpParams, leaves: dict[str, Var], item: BatchItem
) -> Var:
    """Record analysis, every engine step, synthesis, matched filter and aligned MSE."""
    bank, layout = graph.bank, graph.layout
    x = item.rx.samples
    n = x.size
    carriers = modulation(bank.indices, n, bank.n_subbands)

    u = ops.decimate(ops.fir(np.conj(carriers) * x[None, :], leaves[ANALYSIS]), bank.downsample)
    for step in range(layout.n_steps):
        v = ops.symmetric_fir(u, leaves[cd_name(step)])
        b = ops.scale(ops.abs2(v), 1.0 / params.p_ref_w)
        w = ops.shift(v, layout.delays[step])
        for j in range(layout.n_factors):
            b = ops.mimo(b, leaves[mimo_name(step, j)], params.mimo_masks[step][j])
        u = ops.rotate(w, b)
    u = ops.fir(u, leaves[FRACTIONAL], center=0)
    u = ops.rotate(u, leaves[PHASE])

    upsampled = ops.interpolate(u, bank.downsample, n)
    y = ops.row_sum(ops.mul(ops.fir(upsampled, leaves[SYNTHESIS]), carriers))
    matched = ops.fir(y, np.conj(graph.pulse_taps)[::-1])

    n_symbols = len(item.tx)
    kept = n_symbols - 2 * graph.guard
    if kept <= 0:
        raise TapeError(f"guard {graph.guard} leaves no symbols out of {n_symbols}")
    # Centred FIRs add no delay; only the padding and the engine shift the symbol grid.
    start = item.rx.t0_offset + layout.t0_offset + graph.guard * graph.samples_per_symbol
    symbols = ops.take(matched, start, kept, graph.samples_per_symbol)
    return ops.aligned_mse(symbols, item.tx.symbols[graph.guard : graph.guard + kept])


def record_l1(params: DbpParams, leaves: dict[str, Var]) -> Var | None:
    total = None
    for step, factors in enumerate(params.mimo):
        for j in range(len(factors)):
            term = ops.l1(leaves[mimo_name(step, j)], params.mimo_masks[step][j])
            total = term if total is None else ops.add(total, term)
    return total


def forward_loss(graph: LossGraph, params: DbpParams, batch: list[BatchItem]) -> ForwardResult:
    """Mean aligned MSE over ``batch`` plus ``l1_weight`` times the MIMO L1 norm.

    Args:
        graph: Static receiver structure
        params: Current parameters
        batch: Items sharing one configuration

    Returns:
        ForwardResult with the recorded tape
    """
    if not batch:
        raise TapeError("batch is empty")
    params.check_layout(graph.layout)
    tape = Tape()
    leaves = record_leaves(tape, params)

    mse = None
    for item in batch:
        term = record_item(graph, params, leaves, item)
        mse = term if mse is None else ops.add(mse, term)
    mse = ops.scale(mse, 1.0 / len(batch))

    output, l1_value = mse, 0.0
    l1 = record_l1(params, leaves)
    if l1 is not None:
        l1_value = float(l1.value)
        if graph.l1_weight > 0:
            output = ops.add(mse, ops.scale(l1, graph.l1_weight))
    return ForwardResult(
        loss=float(output.value),
        mse=float(mse.value),
        l1=l1_value,
        tape=tape,
        output=output,
    )


def backward(result: ForwardResult, layout: ParamLayout, verify: bool = False) -> np.ndarray:
    """Flat gradient of ``result.loss`` over ``layout``.

    Args:
        result: Output of :func:`forward_loss`
        layout: Segment table of the parameters
        verify: Replay the tape first and fail on any mismatch

    Raises:
        TapeReplayError: If ``verify`` is set and the replay diverges
    """
    if verify:
        result.tape.replay(result.output)
    return layout.flatten_arrays(result.tape.backward(result.output))
