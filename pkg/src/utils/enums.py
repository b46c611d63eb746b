"""Shared Enum definitions."""

from enum import Enum


class GridScheme(str, Enum):
    """Step-size rule of a split-step grid."""
    UNIFORM = "uniform"
    LOGARITHMIC = "logarithmic"


class Constellation(str, Enum):
    """Symbol alphabet used by the transmitter."""
    GAUSSIAN = "gaussian"
    QPSK = "qpsk"
    QAM16 = "qam16"
    QAM64 = "qam64"


class Method(str, Enum):
    """Receiver methods compared by the evaluation sweep."""
    LINEAR = "linear"
    SUBBAND_TDDBP = "subband-tddbp"
    FULL_DBP = "full-dbp"
    FD_SUBBAND = "fd-subband"


class MimoInit(str, Enum):
    """Initialisation of the MIMO intensity filters."""
    RANDOM = "random"
    PHYSICS = "physics"


class Scale(str, Enum):
    """Bundled experiment scales."""
    DESK = "desk"
    PAPER = "paper"
