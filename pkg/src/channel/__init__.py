"""Fiber channel simulation and exact dispersion operators."""

from .fiber import (
    FiberParams,
    StepGrid,
    effective_length,
    group_delay_spread,
    log_step_grid,
    uniform_step_grid,
)
from .linear import COMPENSATE, FORWARD, cd_exact, cd_response, linear_equalize
from .nonlinear import amplify, ase_variance, edfa, kerr_rotate
from .ssfm import backpropagate_fields, full_dbp_baseline, propagate_fields, ssfm_propagate

__all__ = [
    "COMPENSATE",
    "FORWARD",
    "FiberParams",
    "StepGrid",
    "amplify",
    "ase_variance",
    "backpropagate_fields",
    "cd_exact",
    "cd_response",
    "edfa",
    "effective_length",
    "full_dbp_baseline",
    "group_delay_spread",
    "kerr_rotate",
    "linear_equalize",
    "log_step_grid",
    "propagate_fields",
    "ssfm_propagate",
    "uniform_step_grid",
]
