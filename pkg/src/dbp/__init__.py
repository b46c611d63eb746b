"""Subband time-domain digital backpropagation engine."""

from .baselines import fd_subband_dbp_baseline, scalar_tddbp
from .cd_filter import (
    CdFilter,
    apply_cd,
    cosine_basis,
    ideal_cd_response,
    inband_rms_error,
    ls_cd_filter,
    symmetric_response,
    truncated_cd_filter,
    unfold_taps,
)
from .engine import dbp_process
from .fractional import fractional_delay_taps, lagrange_group_delay
from .layout import EngineLayout, build_layout
from .mimo import (
    compose_factors,
    mimo_capacity,
    mimo_intensity_filter,
    mimo_real_multiplications,
    nonlinear_phase_rotate,
    poly_matrix_apply,
)
from .params import DbpParams, init_dbp_params, physics_mimo_init, random_mimo_init, zero_mimo
from .planning import PlannedStep, StepPlan, compute_delta, plan_steps, walk_off_delay
from .receiver import (
    SubbandDbpReceiver,
    detect_symbols,
    dispersion_memory,
    extend_periodic,
    prepare_received,
)

__all__ = [
    "CdFilter",
    "DbpParams",
    "EngineLayout",
    "PlannedStep",
    "StepPlan",
    "SubbandDbpReceiver",
    "apply_cd",
    "build_layout",
    "compose_factors",
    "compute_delta",
    "cosine_basis",
    "dbp_process",
    "detect_symbols",
    "dispersion_memory",
    "extend_periodic",
    "fd_subband_dbp_baseline",
    "fractional_delay_taps",
    "ideal_cd_response",
    "inband_rms_error",
    "init_dbp_params",
    "lagrange_group_delay",
    "ls_cd_filter",
    "mimo_capacity",
    "mimo_intensity_filter",
    "mimo_real_multiplications",
    "nonlinear_phase_rotate",
    "physics_mimo_init",
    "plan_steps",
    "poly_matrix_apply",
    "prepare_received",
    "random_mimo_init",
    "scalar_tddbp",
    "symmetric_response",
    "truncated_cd_filter",
    "unfold_taps",
    "walk_off_delay",
    "zero_mimo",
]
