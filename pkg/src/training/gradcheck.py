"""Central finite-difference check of the reverse-mode gradient."""

import logging

import numpy as np

from ..dbp.params import DbpParams
from .loss import BatchItem, LossGraph, backward, forward_loss
from .param_vector import ParamLayout

logger = logging.getLogger(__name__)


def finite_difference_check(
    graph: LossGraph,
    params: DbpParams,
    batch: list[BatchItem],
    eps: float = 1e-5,
    checks_per_segment: int = 4,
    seed: int = 0,
) -> dict[str, float]:
    """Compare tape gradients with central differences on a few entries per segment.

    The loss is re-evaluated by replaying the recorded tape with perturbed
    leaves. The error of a segment is the largest absolute deviation divided by
    the largest analytic gradient magnitude in that segment.

    Returns:
        Segment name -> relative error
    """
    result = forward_loss(graph, params, batch)
    layout = ParamLayout.from_params(params)
    analytic = backward(result, layout, verify=True)
    flat = layout.flatten(params)
    rng = np.random.default_rng(seed)

    def loss_at(vector: np.ndarray) -> float:
        return float(result.tape.replay(result.output, layout.unflatten_arrays(vector)))

    errors = {}
    for segment in layout.segments:
        indices = np.arange(segment.offset, segment.stop)
        segment_grad = analytic[segment.offset : segment.stop]
        if indices.size > checks_per_segment:
            # Largest gradient entry plus a random sample.
            largest = segment.offset + int(np.argmax(np.abs(segment_grad)))
            others = rng.choice(indices, size=checks_per_segment - 1, replace=False)
            indices = np.unique(np.append(others, largest))
        worst = 0.0
        for index in indices:
            plus, minus = flat.copy(), flat.copy()
            plus[index] += eps
            minus[index] -= eps
            numeric = (loss_at(plus) - loss_at(minus)) / (2.0 * eps)
            worst = max(worst, abs(numeric - analytic[index]))
        scale = max(float(np.max(np.abs(segment_grad))), 1e-12)
        errors[segment.name] = worst / scale
    logger.debug(
        "Gradient check done", extra={"fields": {"worst": max(errors.values(), default=0.0)}}
    )
    return errors
