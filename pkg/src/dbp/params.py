"""Trainable parameters of the subband engine and their initialisation."""

import copy
from dataclasses import dataclass

import numpy as np

from ..channel.fiber import FiberParams, effective_length
from ..filterbank.bank import FilterBankSpec
from ..utils.enums import MimoInit
from ..utils.errors import EngineError
from .cd_filter import CdFilter
from .fractional import fractional_delay_taps
from .layout import EngineLayout
from .mimo import mimo_real_multiplications

DEFAULT_P_REF_W = 1e-3
DEFAULT_INIT_SCALE = 1e-2


@dataclass
class DbpParams:
    """Everything the engine learns.

    Attributes:
        analysis_taps: Analysis prototype
        synthesis_taps: Synthesis prototype
        cd_half_taps: Complex half taps (L+1,) per step
        mimo: Per step, F real factors of shape (R, R, O/F + 1)
        mimo_masks: Boolean masks matching ``mimo``; False marks a pruned coefficient
        frac_taps: Fractional-delay filters, shape (R, n_taps)
        phase: Accumulated phase per subband in rad
        p_ref_w: Reference power dividing intensities before the MIMO stage
    """

    analysis_taps: np.ndarray
    synthesis_taps: np.ndarray
    cd_half_taps: list[np.ndarray]
    mimo: list[list[np.ndarray]]
    mimo_masks: list[list[np.ndarray]]
    frac_taps: np.ndarray
    phase: np.ndarray
    p_ref_w: float = DEFAULT_P_REF_W

    @property
    def n_steps(self) -> int:
        return len(self.cd_half_taps)

    def copy(self) -> "DbpParams":
        return copy.deepcopy(self)

    def cd_filters(self, layout: EngineLayout) -> list[CdFilter]:
        return [CdFilter(half_taps=h, xi_km=xi) for h, xi in zip(self.cd_half_taps, layout.xi_km)]

    def nonzero_per_step(self) -> list[int]:
        return [
            mimo_real_multiplications([np.where(m, g, 0.0) for g, m in zip(factors, masks)])
            for factors, masks in zip(self.mimo, self.mimo_masks)
        ]

    def bank(self, template: FilterBankSpec) -> FilterBankSpec:
        """``template`` with this parameter set's prototypes."""
        return template.with_taps(self.analysis_taps, self.synthesis_taps)

    def check_layout(self, layout: EngineLayout) -> None:
        """Raise EngineError unless every array matches ``layout``."""
        if self.n_steps != layout.n_steps or len(self.mimo) != layout.n_steps:
            raise EngineError(
                f"parameters hold {self.n_steps} steps but the plan has {layout.n_steps}"
            )
        for step, (factors, masks) in enumerate(zip(self.mimo, self.mimo_masks)):
            if len(factors) != layout.n_factors or len(masks) != layout.n_factors:
                raise EngineError(f"step {step} needs {layout.n_factors} MIMO factors")
            for factor, mask in zip(factors, masks):
                if factor.shape != layout.factor_shape(step) or mask.shape != factor.shape:
                    raise EngineError(
                        f"step {step} factor shape {factor.shape} != {layout.factor_shape(step)}"
                    )
        if self.frac_taps.shape != (layout.n_active, layout.frac_taps):
            raise EngineError(f"fractional-delay taps have shape {self.frac_taps.shape}")
        if self.phase.shape != (layout.n_active,):
            raise EngineError(f"phase vector has shape {self.phase.shape}")


def random_mimo_init(
    layout: EngineLayout, rng: np.random.Generator, scale: float = DEFAULT_INIT_SCALE
) -> list[list[np.ndarray]]:
    """Small uniform first factor; later factors are identity plus the same perturbation."""
    steps = []
    for step in range(layout.n_steps):
        shape = layout.factor_shape(step)
        factors = []
        for j in range(layout.n_factors):
            factor = rng.uniform(-scale, scale, size=shape)
            if j > 0:
                factor[:, :, 0] += np.eye(shape[0])
            factors.append(factor)
        steps.append(factors)
    return steps


def physics_mimo_init(
    layout: EngineLayout,
    fiber: FiberParams,
    p_ref_w: float = DEFAULT_P_REF_W,
) -> list[list[np.ndarray]]:
    """Analytic SPM/XPM coefficients for single-factor cascades.

    Subband ``i`` rotates by its own delayed intensity and twice the intensity
    of every other subband averaged over the lags it sweeps during the step.
    The span-averaged power profile scales the step length.
    """
    if layout.n_factors != 1:
        raise EngineError("physics initialisation needs n_factors = 1")
    loss_factor = effective_length(fiber.span_km, fiber.alpha_lin_per_km) / fiber.span_km
    steps = []
    for step, xi in enumerate(layout.xi_km):
        weight = fiber.gamma_per_w_km * xi * loss_factor * p_ref_w
        factor = np.zeros(layout.factor_shape(step))
        d = layout.delays[step]
        for i in range(layout.n_active):
            factor[i, i, d[i]] += weight
            for j in range(layout.n_active):
                if j == i:
                    continue
                lo, hi = sorted((int(d[i]), int(d[j])))
                factor[i, j, lo : hi + 1] += 2.0 * weight / (hi - lo + 1)
        steps.append([factor])
    return steps


def init_dbp_params(
    bank: FilterBankSpec,
    layout: EngineLayout,
    cd_filters: list[CdFilter],
    fiber: FiberParams | None = None,
    mimo_init: MimoInit = MimoInit.RANDOM,
    seed: int = 0,
    p_ref_w: float = DEFAULT_P_REF_W,
    init_scale: float = DEFAULT_INIT_SCALE,
) -> DbpParams:
    """Assemble initial parameters from the bank, CD filters, Lagrange delays and MIMO init."""
    if len(cd_filters) != layout.n_steps:
        raise EngineError(f"{len(cd_filters)} CD filters for {layout.n_steps} steps")
    if MimoInit(mimo_init) is MimoInit.PHYSICS:
        if fiber is None:
            raise EngineError("physics initialisation needs fiber parameters")
        mimo = physics_mimo_init(layout, fiber, p_ref_w)
    else:
        mimo = random_mimo_init(layout, np.random.default_rng(seed), init_scale)
    return DbpParams(
        analysis_taps=bank.analysis_taps.copy(),
        synthesis_taps=bank.synthesis_taps.copy(),
        cd_half_taps=[f.half_taps.copy() for f in cd_filters],
        mimo=mimo,
        mimo_masks=[[np.ones(g.shape, dtype=bool) for g in factors] for factors in mimo],
        frac_taps=np.stack(
            [fractional_delay_taps(mu, layout.frac_taps) for mu in layout.fractional]
        ),
        phase=layout.initial_phase.copy(),
        p_ref_w=p_ref_w,
    )


def zero_mimo(params: DbpParams) -> DbpParams:
    """Copy of ``params`` with every MIMO coefficient set to zero."""
    out = params.copy()
    out.mimo = [[np.zeros_like(g) for g in factors] for factors in params.mimo]
    return out
