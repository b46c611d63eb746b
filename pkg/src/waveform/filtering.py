"""Same-length FIR kernels shared by the waveform, filter-bank and DBP stages.

All filters act along the last axis. A filter ``h`` of length ``L`` with centre
index ``c`` maps ``x`` to ``y[n] = sum_k h[k] x[n + c - k]`` with zeros outside
the input, so ``c = (L - 1) // 2`` is a centred (zero group delay) filter and
``c = 0`` a causal one. Output length always equals input length.
"""

import numpy as np


def fir_same(x: np.ndarray, h: np.ndarray, center: int | None = None) -> np.ndarray:
    """Apply an FIR filter along the last axis, keeping the input length.

    Args:
        x: Input of shape (..., N)
        h: Taps of shape (L,) shared by all rows, or (R, L) one row per row of ``x``
        center: Centre tap index; defaults to the middle tap

    Returns:
        Filtered array of shape (..., N)
    """
    x = np.asarray(x)
    h = np.asarray(h)
    n_taps = h.shape[-1]
    c = (n_taps - 1) // 2 if center is None else center
    n = x.shape[-1]
    dtype = np.result_type(x, h)
    if x.ndim == 1:
        return np.convolve(x, h[-1] if h.ndim > 1 else h)[c : c + n].astype(dtype, copy=False)
    rows = x.reshape(-1, n)
    taps = np.broadcast_to(h, rows.shape[:1] + (n_taps,)) if h.ndim == 1 else h.reshape(-1, n_taps)
    out = np.empty(rows.shape, dtype=dtype)
    for r in range(rows.shape[0]):
        out[r] = np.convolve(rows[r], taps[r])[c : c + n]
    return out.reshape(x.shape[:-1] + (n,))


def fir_same_adjoint(g: np.ndarray, h: np.ndarray, center: int | None = None) -> np.ndarray:
    """Adjoint of :func:`fir_same` with respect to its input."""
    h = np.asarray(h)
    n_taps = h.shape[-1]
    c = (n_taps - 1) // 2 if center is None else center
    return fir_same(g, np.conj(h)[..., ::-1], n_taps - 1 - c)


def lag_correlate(
    g: np.ndarray, x: np.ndarray, n_taps: int, center: int | None = None
) -> np.ndarray:
    """Correlate ``g`` with ``x`` at the lags used by an ``n_taps`` filter.

    Returns ``r[..., k] = sum_n g[..., n] * conj(x[..., n + c - k])``, the
    gradient of a real loss with respect to the taps of :func:`fir_same`.
    """
    c = (n_taps - 1) // 2 if center is None else center
    n = x.shape[-1]
    out = np.zeros(x.shape[:-1] + (n_taps,), dtype=np.result_type(g, x))
    xc = np.conj(x)
    for k in range(n_taps):
        s = c - k
        lo, hi = max(0, -s), min(n, n - s)
        if hi > lo:
            out[..., k] = np.sum(g[..., lo:hi] * xc[..., lo + s : hi + s], axis=-1)
    return out


def shift_rows(x: np.ndarray, delays) -> np.ndarray:
    """Delay each row of ``x`` by an integer number of samples, zero filled.

    ``y[r, n] = x[r, n - delays[r]]``; negative delays advance the row.
    """
    x = np.asarray(x)
    delays = np.broadcast_to(np.asarray(delays, dtype=int), x.shape[:-1])
    n = x.shape[-1]
    out = np.zeros_like(x)
    for idx in np.ndindex(*x.shape[:-1]):
        d = int(delays[idx])
        if d >= n or -d >= n:
            continue
        if d >= 0:
            out[idx + (slice(d, n),)] = x[idx + (slice(0, n - d),)]
        else:
            out[idx + (slice(0, n + d),)] = x[idx + (slice(-d, n),)]
    return out
