"""Flat real-valued view over every trainable array of the engine."""

from dataclasses import dataclass

import numpy as np

from ..dbp.params import DbpParams
from ..utils.errors import TapeError

ANALYSIS = "analysis_taps"
SYNTHESIS = "synthesis_taps"
FRACTIONAL = "frac_delay"
PHASE = "phase"


def cd_name(step: int) -> str:
    return f"cd/{step}"


def mimo_name(step: int, factor: int) -> str:
    return f"mimo/{step}/{factor}"


@dataclass(frozen=True)
class Segment:
    """Named slice of the flat vector; complex arrays store interleaved re/im pairs."""

    name: str
    offset: int
    shape: tuple[int, ...]
    is_complex: bool

    @property
    def size(self) -> int:
        count = int(np.prod(self.shape, dtype=int))
        return 2 * count if self.is_complex else count

    @property
    def stop(self) -> int:
        return self.offset + self.size


def named_arrays(params: DbpParams) -> dict[str, np.ndarray]:
    """Trainable arrays of ``params`` keyed by segment name, in canonical order."""
    arrays = {ANALYSIS: params.analysis_taps, SYNTHESIS: params.synthesis_taps}
    for step, taps in enumerate(params.cd_half_taps):
        arrays[cd_name(step)] = taps
    for step, factors in enumerate(params.mimo):
        for j, factor in enumerate(factors):
            arrays[mimo_name(step, j)] = factor
    arrays[FRACTIONAL] = params.frac_taps
    arrays[PHASE] = params.phase
    return arrays


class ParamLayout:
    """Segment table shared by parameters, gradients and optimiser state."""

    def __init__(self, segments: list[Segment]) -> None:
        names = [s.name for s in segments]
        if len(set(names)) != len(names):
            raise TapeError("segment names must be unique")
        self.segments = segments
        self._by_name = {s.name: s for s in segments}

    @classmethod
    def from_params(cls, params: DbpParams) -> "ParamLayout":
        segments, offset = [], 0
        for name, array in named_arrays(params).items():
            segment = Segment(name, offset, tuple(np.shape(array)), bool(np.iscomplexobj(array)))
            segments.append(segment)
            offset = segment.stop
        return cls(segments)

    @property
    def size(self) -> int:
        return self.segments[-1].stop if self.segments else 0

    @property
    def names(self) -> list[str]:
        return [s.name for s in self.segments]

    def __getitem__(self, name: str) -> Segment:
        return self._by_name[name]

    def flatten_arrays(self, arrays: dict[str, np.ndarray]) -> np.ndarray:
        """Pack named arrays (parameters or gradients) into one float64 vector."""
        flat = np.zeros(self.size)
        for segment in self.segments:
            value = arrays[segment.name]
            if segment.is_complex:
                packed = np.asarray(value, dtype=np.complex128).reshape(-1).view(np.float64)
                flat[segment.offset : segment.stop] = packed
            else:
                flat[segment.offset : segment.stop] = np.real(value).reshape(-1)
        return flat

    def unflatten_arrays(self, flat: np.ndarray) -> dict[str, np.ndarray]:
        if flat.shape != (self.size,):
            raise TapeError(f"expected a vector of {self.size} values, got shape {flat.shape}")
        arrays = {}
        for segment in self.segments:
            chunk = np.array(flat[segment.offset : segment.stop], dtype=np.float64)
            if segment.is_complex:
                chunk = chunk.view(np.complex128)
            arrays[segment.name] = chunk.reshape(segment.shape)
        return arrays

    def flatten(self, params: DbpParams) -> np.ndarray:
        return self.flatten_arrays(named_arrays(params))

    def unflatten(self, flat: np.ndarray, template: DbpParams) -> DbpParams:
        """Parameters shaped like ``template`` holding the values of ``flat``."""
        arrays = self.unflatten_arrays(flat)
        out = template.copy()
        out.analysis_taps = arrays[ANALYSIS]
        out.synthesis_taps = arrays[SYNTHESIS]
        out.cd_half_taps = [arrays[cd_name(step)] for step in range(template.n_steps)]
        out.mimo = [
            [arrays[mimo_name(step, j)] for j in range(len(factors))]
            for step, factors in enumerate(template.mimo)
        ]
        out.frac_taps = arrays[FRACTIONAL]
        out.phase = arrays[PHASE]
        return out

    def trainable_mask(self, params: DbpParams) -> np.ndarray:
        """True for every entry that may change; pruned MIMO coefficients are False."""
        mask = np.ones(self.size, dtype=bool)
        for step, masks in enumerate(params.mimo_masks):
            for j, m in enumerate(masks):
                segment = self[mimo_name(step, j)]
                mask[segment.offset : segment.stop] = m.reshape(-1)
        return mask

    def mimo_slices(self) -> list[slice]:
        return [slice(s.offset, s.stop) for s in self.segments if s.name.startswith("mimo/")]


@dataclass
class ParamVector:
    """Flat parameter values paired with their layout."""

    values: np.ndarray
    layout: ParamLayout

    @classmethod
    def from_params(cls, params: DbpParams) -> "ParamVector":
        layout = ParamLayout.from_params(params)
        return cls(values=layout.flatten(params), layout=layout)

    def to_params(self, template: DbpParams) -> DbpParams:
        return self.layout.unflatten(self.values, template)

    def segment(self, name: str) -> np.ndarray:
        return self.layout.unflatten_arrays(self.values)[name]
