"""Joint optimisation of the subband engine parameters."""

from .adam import AdamState, PlateauSchedule, adam_step
from .gradcheck import finite_difference_check
from .loss import BatchItem, ForwardResult, LossGraph, backward, forward_loss
from .param_vector import ParamLayout, ParamVector, Segment
from .pretrain import cascade_error, pretrain_cd
from .sparsity import sparsity_report, threshold_sparsify
from .trainer import TrainingCurves, batch_gradient, check_digest, train, validation_snr

__all__ = [
    "AdamState",
    "BatchItem",
    "ForwardResult",
    "LossGraph",
    "ParamLayout",
    "ParamVector",
    "PlateauSchedule",
    "Segment",
    "TrainingCurves",
    "adam_step",
    "backward",
    "batch_gradient",
    "cascade_error",
    "check_digest",
    "finite_difference_check",
    "forward_loss",
    "pretrain_cd",
    "sparsity_report",
    "threshold_sparsify",
    "train",
    "validation_snr",
]
