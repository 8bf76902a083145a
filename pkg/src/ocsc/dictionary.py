"""Constant-size sample history and the ADMM dictionary update.

The history compresses everything the dictionary step needs from past
samples into one K-vector and one inverted K x K matrix per frequency:
running averages of cross terms between sample spectra and code spectra,
and the regularized inverse of the running code Gram matrix. Its footprint
depends only on (K, P), never on how many samples have streamed through.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    DivergenceError,
    ShapeMismatchError,
    UninitializedHistoryError,
)
from .transforms import (
    SignalShape,
    crop_filter_cols,
    forward_dft_cols,
    inverse_dft_cols,
    pad_filter_cols,
)


@dataclass
class HistoryState:
    """Running frequency-domain summary of all samples seen so far.

    cross[p] averages conj(x(p)) * zrow(p) over samples; inv_gram[p] is the
    exact inverse of (averaged Gram(p) + rho * P * I), where Gram(p) averages
    outer(zrow(p), conj(zrow(p))). With this orientation the quadratic form
    row . Gram . conj(row) expands to |row . zrow|^2, the actual per-frequency
    residual energy. rho is fixed at construction; changing it would
    invalidate every stored inverse.
    """

    count: int
    cross: np.ndarray      # (P, K) complex
    inv_gram: np.ndarray   # (P, K, K) complex, Hermitian
    rho: float
    shape: SignalShape

    @property
    def n_filters(self) -> int:
        return self.cross.shape[1]

    @property
    def nbytes(self) -> int:
        return self.cross.nbytes + self.inv_gram.nbytes


def empty_history(shape: SignalShape, n_filters: int, rho: float = 10.0) -> HistoryState:
    """History before any sample: zero cross terms, placeholder inverses."""
    P = shape.size
    return HistoryState(
        count=0,
        cross=np.zeros((P, n_filters), dtype=np.complex128),
        inv_gram=np.zeros((P, n_filters, n_filters), dtype=np.complex128),
        rho=float(rho),
        shape=shape,
    )


def _hermitize(mats: np.ndarray) -> np.ndarray:
    return 0.5 * (mats + mats.conj().transpose(0, 2, 1))


def update_history(h: HistoryState, z_freq, x_freq) -> HistoryState:
    """Fold one (code spectrum, sample spectrum) pair into the running state.

    The first sample uses the closed rank-one form over the pure ridge base.
    Later samples rescale the stored inverse through one well-conditioned
    Hermitian solve and one rank-one correction, keeping inv_gram the exact
    inverse of (averaged Gram + rho * P * I) at every step. Updates mutate
    h in place and return it.
    """
    z = np.asarray(z_freq, dtype=np.complex128)
    x = np.asarray(x_freq, dtype=np.complex128).ravel()
    P, K = h.cross.shape
    if z.shape != (P, K):
        raise ShapeMismatchError(f"code spectrum must be ({P}, {K}), got {z.shape}")
    if x.shape != (P,):
        raise ShapeMismatchError(f"sample spectrum must be ({P},), got {x.shape}")
    if not (np.isfinite(z).all() and np.isfinite(x).all()):
        raise DivergenceError("non-finite spectrum rejected before history update")

    t = h.count + 1
    ridge = h.rho * P
    h.cross *= 1.0 - 1.0 / t
    h.cross += (1.0 / t) * x.conj()[:, None] * z

    outer = z[:, :, None] * z.conj()[:, None, :]
    if t == 1:
        scale = ridge + np.einsum("pk,pk->p", z, z.conj()).real
        h.inv_gram = (np.eye(K) - outer / scale[:, None, None]) / ridge
    else:
        # inv((1-1/t) * old_gram + (1/t) * ridge * I) via a solve against the
        # stored inverse, then fold in the new rank-one term.
        eye = np.eye(K)
        g = (1.0 - 1.0 / t) * eye + (ridge / t) * h.inv_gram
        base_inv = _hermitize(np.linalg.solve(g, h.inv_gram))
        w = np.einsum("pjk,pk->pj", base_inv, z)
        s = np.einsum("pk,pk->p", z.conj(), w).real
        h.inv_gram = base_inv - w[:, :, None] * w.conj()[:, None, :] / (
            (t + s)[:, None, None]
        )
    h.inv_gram = _hermitize(h.inv_gram)
    h.count = t
    return h


def batch_history(
    z_freqs, x_freqs, shape: SignalShape, rho: float = 10.0
) -> HistoryState:
    """Build the history from a full corpus at once with uniform weights."""
    z = np.asarray(z_freqs, dtype=np.complex128)  # (N, P, K)
    x = np.asarray(x_freqs, dtype=np.complex128)  # (N, P)
    if z.ndim != 3 or x.ndim != 2 or z.shape[:2] != (x.shape[0], shape.size):
        raise ShapeMismatchError("expected (N, P, K) code and (N, P) sample spectra")
    n = z.shape[0]
    cross = np.einsum("np,npk->pk", x.conj(), z) / n
    gram = np.einsum("npj,npk->pjk", z, z.conj()) / n
    ridge = rho * shape.size
    gram[:, np.arange(z.shape[2]), np.arange(z.shape[2])] += ridge
    inv_gram = _hermitize(np.linalg.inv(gram))
    return HistoryState(count=n, cross=cross, inv_gram=inv_gram, rho=float(rho), shape=shape)


def solve_dict_rows(h: HistoryState, v_freq, dual_freq) -> np.ndarray:
    """Exact row-wise minimizer of the quadratic dictionary subproblem.

    Row p returns (conj(cross[p]) + rho*P*(v - dual)[p]) @ inv_gram[p], the
    stationary point of the history data term plus the ADMM proximal term.
    """
    ridge = h.rho * h.shape.size
    q = h.cross.conj() + ridge * (np.asarray(v_freq) - np.asarray(dual_freq))
    return np.einsum("pk,pkj->pj", q, h.inv_gram)


def project_filter_cols(freq_cols, shape: SignalShape) -> np.ndarray:
    """Crop each column to filter support and scale into the unit l2 ball.

    Input columns are spectra; output is the padded spatial result (P, K).
    """
    spatial = inverse_dft_cols(freq_cols, shape)
    alpha = crop_filter_cols(spatial, shape)
    norms = np.linalg.norm(alpha, axis=0)
    alpha = alpha / np.maximum(norms, 1.0)
    return pad_filter_cols(alpha, shape)


@dataclass
class DictState:
    """Dictionary ADMM iterate: spectrum rows, feasible spatial copy, dual."""

    freq: np.ndarray   # (P, K) complex
    v: np.ndarray      # (P, K) real, padded spatial, feasible
    dual: np.ndarray   # (P, K) complex


def dict_state_from_filters(filters, shape: SignalShape) -> DictState:
    """Start the dictionary iterate from (M, K) spatial filters."""
    padded = pad_filter_cols(filters, shape)
    return DictState(
        freq=forward_dft_cols(padded, shape),
        v=padded,
        dual=np.zeros(padded.shape, dtype=np.complex128),
    )


def update_dictionary(
    d_prev: DictState,
    h: HistoryState,
    iters: int,
    tol: float | None = None,
    monitor=None,
) -> DictState:
    """Inner ADMM for the dictionary given the current history.

    Seeds the feasible copy with the previous spatial dictionary and resets
    the dual to zero, then alternates exact row solves, projection onto
    supported unit-ball filters, and the dual step. Carrying the previous
    dictionary through the feasible copy lets a handful of rounds refine it
    instead of rebuilding it from nothing on every call. With tol set, stops
    once the worst per-filter relative gap between the spectrum and its
    feasible copy drops below it. monitor(tau, freq, v) is called after each
    round when given.
    """
    if h.count == 0:
        raise UninitializedHistoryError("dictionary update requested at t=0")
    if iters == 0:
        return d_prev
    shape = h.shape
    v = np.asarray(d_prev.v, dtype=np.float64).copy()
    v_freq = forward_dft_cols(v, shape)
    dual = np.zeros_like(v_freq)
    d_freq = np.asarray(d_prev.freq, dtype=np.complex128).copy()
    for tau in range(1, iters + 1):
        d_freq = solve_dict_rows(h, v_freq, dual)
        v = project_filter_cols(d_freq + dual, shape)
        v_freq = forward_dft_cols(v, shape)
        dual = dual + d_freq - v_freq
        if monitor is not None:
            monitor(tau, d_freq, v)
        if tol is not None:
            gaps = np.linalg.norm(d_freq - v_freq, axis=0)
            scales = np.maximum(np.linalg.norm(d_freq, axis=0), 1e-12)
            if (gaps / scales).max() < tol:
                break
    return DictState(freq=d_freq, v=v, dual=dual)


def reconstruct_gram(h: HistoryState) -> np.ndarray:
    """Invert the stored inverses back to the averaged Gram matrices.

    Monitoring and test helper; the training path never needs raw Grams.
    """
    mats = np.linalg.inv(h.inv_gram)
    ridge = h.rho * h.shape.size
    k = h.n_filters
    mats[:, np.arange(k), np.arange(k)] -= ridge
    return _hermitize(mats)


def quadratic_objective(d_freq, gram, cross, size: int) -> float:
    """History form of the dictionary data term.

    (1/2P) sum_p row(p) gram(p) row(p)^H - (1/P) sum_p Re(row(p) . cross(p));
    equals the averaged frequency-domain residual up to a constant that does
    not depend on the dictionary.
    """
    d = np.asarray(d_freq, dtype=np.complex128)
    quad = np.einsum("pj,pjk,pk->", d, gram, d.conj()).real
    lin = np.einsum("pk,pk->", d, cross).real
    return (0.5 * quad - lin) / size


def dict_objective(d_freq, h: HistoryState) -> float:
    """Evaluate the history data term at a dictionary spectrum."""
    if h.count == 0:
        raise UninitializedHistoryError("objective undefined at t=0")
    return quadratic_objective(d_freq, reconstruct_gram(h), h.cross, h.shape.size)
