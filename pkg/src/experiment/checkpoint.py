"""Persist trained engine parameters."""

from pathlib import Path

import numpy as np

from ..dbp.params import DbpParams
from ..training.param_vector import (
    ANALYSIS,
    FRACTIONAL,
    PHASE,
    SYNTHESIS,
    cd_name,
    mimo_name,
    named_arrays,
)
from ..utils.errors import ContainerError
from .container import Container, read_container, write_container

CHECKPOINT_KIND = "checkpoint"


def _mask_name(step: int, factor: int) -> str:
    return f"mask/{step}/{factor}"


def save_checkpoint(
    path: Path, params: DbpParams, digest: str, force: bool = False, meta: dict | None = None
) -> Path:
    arrays = dict(named_arrays(params))
    for step, masks in enumerate(params.mimo_masks):
        for j, mask in enumerate(masks):
            arrays[_mask_name(step, j)] = mask
    header = dict(meta or {})
    header.update(
        {
            "p_ref_w": params.p_ref_w,
            "n_steps": params.n_steps,
            "n_factors": len(params.mimo[0]) if params.mimo else 0,
        }
    )
    container = Container(digest=digest, kind=CHECKPOINT_KIND, arrays=arrays, meta=header)
    return write_container(path, container, force)


def load_checkpoint(path: Path) -> tuple[DbpParams, Container]:
    """Parameters stored at ``path`` and the container they came from."""
    container = read_container(path, CHECKPOINT_KIND)
    arrays, meta = container.arrays, container.meta
    try:
        steps, factors = int(meta["n_steps"]), int(meta["n_factors"])
        params = DbpParams(
            analysis_taps=arrays[ANALYSIS],
            synthesis_taps=arrays[SYNTHESIS],
            cd_half_taps=[arrays[cd_name(s)] for s in range(steps)],
            mimo=[[arrays[mimo_name(s, j)] for j in range(factors)] for s in range(steps)],
            mimo_masks=[
                [arrays[_mask_name(s, j)].astype(bool) for j in range(factors)]
                for s in range(steps)
            ],
            frac_taps=arrays[FRACTIONAL],
            phase=np.asarray(arrays[PHASE], dtype=float),
            p_ref_w=float(meta["p_ref_w"]),
        )
    except KeyError as e:
        raise ContainerError(f"{path} is missing checkpoint entry {e}") from e
    return params, container
