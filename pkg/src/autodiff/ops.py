"""Differentiable primitives of the receiver graph.

Each function takes tape variables (or plain arrays treated as constants) and
returns a new variable. Adjoint rules follow the tape's complex gradient
convention.
"""

import numpy as np

from ..dbp.cd_filter import apply_cd
from ..dbp.mimo import poly_matrix_apply
from ..waveform.filtering import fir_same, fir_same_adjoint, lag_correlate, shift_rows
from .tape import Tape, Var


def _tape(*args) -> Tape:
    for arg in args:
        if isinstance(arg, Var):
            return arg.tape
    raise TypeError("at least one argument must be a tape variable")


def unbroadcast(g: np.ndarray, shape: tuple[int, ...]) -> np.ndarray:
    """Sum ``g`` down to ``shape`` after numpy broadcasting."""
    while g.ndim > len(shape):
        g = g.sum(axis=0)
    for axis, size in enumerate(shape):
        if size == 1 and g.shape[axis] != 1:
            g = g.sum(axis=axis, keepdims=True)
    return g


def _trailing(b: np.ndarray, ndim: int) -> np.ndarray:
    return np.reshape(b, np.shape(b) + (1,) * (ndim - np.ndim(b)))


def fir(x, h, center: int | None = None) -> Var:
    """Same-length FIR filter along the last axis; ``h`` shared or one row per row."""

    def forward(xv, hv):
        return fir_same(xv, hv, center)

    def vjp(g, y, parents, needs):
        xv, hv = parents
        n_taps = hv.shape[-1]
        gx = fir_same_adjoint(g, hv, center) if needs[0] else None
        gh = None
        if needs[1]:
            gh = lag_correlate(g, xv, n_taps, center)
            if hv.ndim == 1 and gh.ndim > 1:
                gh = gh.reshape(-1, n_taps).sum(axis=0)
        return gx, gh

    return _tape(x, h).record("fir", [x, h], forward, vjp)


def symmetric_fir(x, half_taps) -> Var:
    """Folded symmetric filter with complex half taps shared by all rows."""

    def forward(xv, cv):
        return apply_cd(xv, cv)

    def vjp(g, y, parents, needs):
        xv, cv = parents
        half_length = cv.size - 1
        gx = apply_cd(g, np.conj(cv)) if needs[0] else None
        gc = None
        if needs[1]:
            full = lag_correlate(g, xv, 2 * half_length + 1, half_length)
            full = full.reshape(-1, full.shape[-1]).sum(axis=0)
            gc = full[half_length:].copy()
            gc[1:] += full[half_length - 1 :: -1][:half_length]
        return gx, gc

    return _tape(x, half_taps).record("symmetric_fir", [x, half_taps], forward, vjp)


def mul(x, p) -> Var:
    """Elementwise product with broadcasting."""

    def vjp(g, y, parents, needs):
        xv, pv = parents
        gx = unbroadcast(g * np.conj(pv), np.shape(xv)) if needs[0] else None
        gp = unbroadcast(g * np.conj(xv), np.shape(pv)) if needs[1] else None
        return gx, gp

    return _tape(x, p).record("mul", [x, p], lambda xv, pv: xv * pv, vjp)


def scale(x, factor: float) -> Var:
    def vjp(g, y, parents, needs):
        return (np.conj(factor) * g,)

    return _tape(x).record("scale", [x], lambda xv: factor * xv, vjp)


def add(x, y) -> Var:
    def vjp(g, out, parents, needs):
        return unbroadcast(g, np.shape(parents[0])), unbroadcast(g, np.shape(parents[1]))

    return _tape(x, y).record("add", [x, y], lambda a, b: a + b, vjp)


def rotate(x, b) -> Var:
    """``x * exp(j*b)`` with real ``b`` broadcast over trailing axes of ``x``."""

    def forward(xv, bv):
        return xv * np.exp(1j * _trailing(bv, np.ndim(xv)))

    def vjp(g, y, parents, needs):
        xv, bv = parents
        phasor = np.exp(-1j * _trailing(bv, np.ndim(xv)))
        gx = unbroadcast(g * phasor, np.shape(xv)) if needs[0] else None
        gb = None
        if needs[1]:
            gb = np.imag(g * np.conj(y))
            while gb.ndim > np.ndim(bv):
                gb = gb.sum(axis=-1)
        return gx, gb

    return _tape(x, b).record("rotate", [x, b], forward, vjp)


def abs2(x) -> Var:
    def vjp(g, y, parents, needs):
        return (2.0 * parents[0] * g,)

    return _tape(x).record("abs2", [x], lambda xv: np.abs(xv) ** 2, vjp)


def shift(x, delays: np.ndarray) -> Var:
    """Integer per-row delays, zero filled."""
    delays = np.asarray(delays, dtype=int)

    def vjp(g, y, parents, needs):
        return (shift_rows(g, -delays),)

    return _tape(x).record("shift", [x], lambda xv: shift_rows(xv, delays), vjp)


def decimate(x, factor: int) -> Var:
    """Keep samples 0, K, 2K, ... along the last axis."""

    def vjp(g, y, parents, needs):
        gx = np.zeros_like(parents[0], dtype=np.result_type(g, parents[0]))
        gx[..., ::factor] = g
        return (gx,)

    return _tape(x).record("decimate", [x], lambda xv: xv[..., ::factor].copy(), vjp)


def interpolate(x, factor: int, length: int) -> Var:
    """Insert K-1 zeros between samples and cut or pad to ``length``."""

    def forward(xv):
        width = min(-(-length // factor), xv.shape[-1])
        out = np.zeros(xv.shape[:-1] + (length,), dtype=xv.dtype)
        out[..., : width * factor : factor] = xv[..., :width]
        return out

    def vjp(g, y, parents, needs):
        xv = parents[0]
        width = min(-(-length // factor), xv.shape[-1])
        gx = np.zeros(xv.shape, dtype=g.dtype)
        gx[..., :width] = g[..., : width * factor : factor]
        return (gx,)

    return _tape(x).record("interpolate", [x], forward, vjp)


def row_sum(x) -> Var:
    def vjp(g, y, parents, needs):
        return (np.broadcast_to(g, parents[0].shape).copy(),)

    return _tape(x).record("row_sum", [x], lambda xv: xv.sum(axis=0), vjp)


def take(x, start: int, count: int, step: int = 1) -> Var:
    """``count`` samples from ``start`` with stride ``step`` along the last axis."""
    stop = start + count * step

    def forward(xv):
        out = xv[..., start:stop:step]
        if out.shape[-1] != count:
            raise IndexError(f"cannot take {count} samples from index {start} of {xv.shape[-1]}")
        return out.copy()

    def vjp(g, y, parents, needs):
        gx = np.zeros(parents[0].shape, dtype=np.result_type(g, parents[0]))
        gx[..., start:stop:step] = g
        return (gx,)

    return _tape(x).record("take", [x], forward, vjp)


def mimo(a, coefficients, mask: np.ndarray) -> Var:
    """Causal polynomial-matrix filter of real rows with masked coefficients."""

    def forward(av, gv):
        return poly_matrix_apply(gv, av, mask)

    def vjp(g, b, parents, needs):
        av, gv = parents
        masked = np.where(mask, gv, 0.0)
        n = av.shape[-1]
        ga = np.zeros_like(av) if needs[0] else None
        gg = np.zeros_like(gv) if needs[1] else None
        for k in range(min(gv.shape[2], n)):
            if ga is not None:
                ga[:, : n - k] += masked[:, :, k].T @ g[:, k:]
            if gg is not None:
                gg[:, :, k] = g[:, k:] @ av[:, : n - k].T
        if gg is not None:
            gg = gg * mask
        return ga, gg

    return _tape(a, coefficients).record("mimo", [a, coefficients], forward, vjp)


def aligned_mse(rx, tx: np.ndarray) -> Var:
    """min over complex a of mean|a*rx - tx|^2, with a solved in closed form."""
    tx = np.asarray(tx)

    def optimum(rv):
        energy = np.vdot(rv, rv).real
        return np.vdot(rv, tx) / energy if energy > 0 else 0.0

    def forward(rv):
        a = optimum(rv)
        return np.asarray(np.mean(np.abs(a * rv - tx) ** 2))

    def vjp(g, y, parents, needs):
        rv = parents[0]
        a = optimum(rv)
        error = a * rv - tx
        return (2.0 * np.conj(a) * error * g / rv.size,)

    return _tape(rx).record("aligned_mse", [rx], forward, vjp)


def l1(x, mask: np.ndarray | None = None) -> Var:
    """Sum of absolute values of the unmasked entries; subgradient 0 at 0."""
    keep = np.ones(1, dtype=bool) if mask is None else mask

    def forward(xv):
        return np.asarray(np.sum(np.abs(np.where(keep, xv, 0.0))))

    def vjp(g, y, parents, needs):
        return (g * np.sign(parents[0]) * keep,)

    return _tape(x).record("l1", [x], forward, vjp)
