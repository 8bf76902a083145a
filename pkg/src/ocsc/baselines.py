"""Accelerated projected-gradient baseline for the dictionary subproblem.

Unlike the streaming history, this variant keeps the raw per-frequency Gram
matrices, which is what the gradient needs. It exists to benchmark the ADMM
dictionary update against and as an alternative batch training mode.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import sqrt

import numpy as np

from .dictionary import project_filter_cols, quadratic_objective
from .errors import ShapeMismatchError
from .transforms import SignalShape, forward_dft_cols


@dataclass
class DenseHistory:
    """Sample summary keeping raw averaged Gram matrices per frequency."""

    count: int
    cross: np.ndarray   # (P, K) complex
    gram: np.ndarray    # (P, K, K) complex, Hermitian PSD
    shape: SignalShape

    @property
    def n_filters(self) -> int:
        return self.cross.shape[1]


def dense_history(z_freqs, x_freqs, shape: SignalShape) -> DenseHistory:
    """Average cross and Gram terms over a corpus of code/sample spectra."""
    z = np.asarray(z_freqs, dtype=np.complex128)
    x = np.asarray(x_freqs, dtype=np.complex128)
    if z.ndim != 3 or x.ndim != 2 or z.shape[:2] != (x.shape[0], shape.size):
        raise ShapeMismatchError("expected (N, P, K) code and (N, P) sample spectra")
    n = z.shape[0]
    cross = np.einsum("np,npk->pk", x.conj(), z) / n
    gram = np.einsum("npj,npk->pjk", z, z.conj()) / n
    gram = 0.5 * (gram + gram.conj().transpose(0, 2, 1))
    return DenseHistory(count=n, cross=cross, gram=gram, shape=shape)


def update_dense_history(h: DenseHistory, z_freq, x_freq) -> DenseHistory:
    """Streaming average update mirroring the compact history's weights."""
    z = np.asarray(z_freq, dtype=np.complex128)
    x = np.asarray(x_freq, dtype=np.complex128).ravel()
    t = h.count + 1
    h.cross *= 1.0 - 1.0 / t
    h.cross += (1.0 / t) * x.conj()[:, None] * z
    h.gram *= 1.0 - 1.0 / t
    h.gram += (1.0 / t) * z[:, :, None] * z.conj()[:, None, :]
    h.count = t
    return h


def _lipschitz(gram: np.ndarray, size: int, steps: int = 50) -> float:
    """Largest per-frequency Gram eigenvalue over P, by power iteration."""
    P, K, _ = gram.shape
    # deterministic start with a ramp so no symmetric instance traps it
    v = np.ones((P, K), dtype=np.complex128) + np.arange(K) / max(K, 1)
    v /= np.linalg.norm(v, axis=1, keepdims=True)
    for _ in range(steps):
        v = np.einsum("pjk,pk->pj", gram, v)
        norms = np.maximum(np.linalg.norm(v, axis=1, keepdims=True), 1e-300)
        v = v / norms
    rayleigh = np.einsum("pj,pjk,pk->p", v.conj(), gram, v).real
    return float(rayleigh.max()) / size


def fista_dict_update(
    h: DenseHistory, d_init, iters: int
) -> tuple[np.ndarray, list[float]]:
    """Projected accelerated gradient on the dictionary data term.

    Steps 1/L with L the largest Gram eigenvalue over frequencies divided by
    P; each iterate is projected by crop, unit-ball scale, pad, transform.
    Returns the final spectrum and the objective at every projected iterate.
    """
    size = h.shape.size
    lip = _lipschitz(h.gram, size)
    step = 1.0 / max(lip, 1e-300)
    cross_row = h.cross.conj()

    d = np.asarray(d_init, dtype=np.complex128).copy()
    y = d.copy()
    t_momentum = 1.0
    trace: list[float] = []
    for _ in range(iters):
        grad = (np.einsum("pk,pkj->pj", y, h.gram) - cross_row) / size
        d_new = forward_dft_cols(project_filter_cols(y - step * grad, h.shape), h.shape)
        t_next = 0.5 * (1.0 + sqrt(1.0 + 4.0 * t_momentum * t_momentum))
        y = d_new + ((t_momentum - 1.0) / t_next) * (d_new - d)
        t_momentum = t_next
        d = d_new
        trace.append(quadratic_objective(d, h.gram, h.cross, size))
    return d, trace
