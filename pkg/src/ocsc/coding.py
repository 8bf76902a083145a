"""Sparse coding of one signal against a fixed dictionary.

The data term lives in the frequency domain, the l1 penalty on a spatial
copy of the code, and an ADMM splitting ties them together. Each frequency
decouples into a rank-one-plus-ridge system solved in closed form, so one
iteration costs O(KP) plus the transforms.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DivergenceError, ShapeMismatchError
from .transforms import (
    SignalShape,
    forward_dft,
    forward_dft_cols,
    inverse_dft,
    inverse_dft_cols,
)


@dataclass(frozen=True)
class CodingConfig:
    """Knobs for the per-sample code solver."""

    beta: float = 1.0        # l1 weight
    rho: float = 1.0         # ADMM penalty
    max_iters: int = 300
    rel_tol: float = 1e-3    # stop when the spatial code moves less than this


@dataclass
class CodeState:
    """Solver output: frequency iterate, sparse spatial code, scaled dual."""

    z_freq: np.ndarray       # (P, K) complex
    code: np.ndarray         # (P, K) real, exactly sparse
    dual: np.ndarray         # (P, K) real
    iterations: int = 0


def soft_threshold(x, t: float) -> np.ndarray:
    """Elementwise shrinkage: sign(x) * max(|x| - t, 0)."""
    x = np.asarray(x)
    return np.sign(x) * np.maximum(np.abs(x) - t, 0.0)


def solve_code_rows(dict_freq, x_freq, target, rho: float) -> np.ndarray:
    """Closed-form minimizer of the per-frequency code subproblem, all rows.

    Row p solves min_z (1/2P)|x(p) - d.z|^2 + (rho/2P)||z - target(p)||^2
    with d = dict_freq[p]; the normal matrix conj(d)d^T + rho*I is inverted
    by the rank-one identity, so each row costs O(K).
    """
    d = np.asarray(dict_freq, dtype=np.complex128)
    t = np.asarray(target, dtype=np.complex128)
    x = np.asarray(x_freq, dtype=np.complex128)
    rhs = d.conj() * x[:, None] + rho * t
    s = np.einsum("pk,pk->p", d, rhs)
    denom = rho + np.einsum("pk,pk->p", d, d.conj()).real
    return (rhs - d.conj() * (s / denom)[:, None]) / rho


def infer_code(
    x,
    dict_freq,
    shape: SignalShape,
    config: CodingConfig = CodingConfig(),
    warm: CodeState | None = None,
    monitor=None,
) -> CodeState:
    """ADMM sparse coding of one signal; returns the exactly-sparse code.

    monitor(iteration, code) is called after each iteration when given.
    """
    dict_freq = np.asarray(dict_freq, dtype=np.complex128)
    if dict_freq.ndim != 2 or dict_freq.shape[0] != shape.size:
        raise ShapeMismatchError(
            f"dictionary spectrum must be ({shape.size}, K), got {dict_freq.shape}"
        )
    n_filters = dict_freq.shape[1]
    x_freq = forward_dft(x, shape)

    if warm is not None:
        if warm.code.shape != (shape.size, n_filters):
            raise ShapeMismatchError("warm start does not match (P, K)")
        code = warm.code.copy()
        dual = warm.dual.copy()
    else:
        code = np.zeros((shape.size, n_filters))
        dual = np.zeros((shape.size, n_filters))

    z_freq = np.zeros((shape.size, n_filters), dtype=np.complex128)
    shrink = config.beta / config.rho
    iterations = 0
    for it in range(1, config.max_iters + 1):
        iterations = it
        target = forward_dft_cols(code - dual, shape)
        z_freq = solve_code_rows(dict_freq, x_freq, target, config.rho)
        z_spatial = inverse_dft_cols(z_freq, shape)
        new_code = soft_threshold(z_spatial + dual, shrink)
        if not np.isfinite(new_code).all():
            raise DivergenceError(f"code solver diverged at iteration {it}")
        dual = dual + z_spatial - new_code
        num = np.linalg.norm(new_code - code)
        den = np.linalg.norm(new_code)
        code = new_code
        if monitor is not None:
            monitor(it, code)
        # the change test alone fires spuriously while the code sits at zero
        # with the dual still ramping, so the split gap must settle too
        gap = np.linalg.norm(z_spatial - code)
        gap_scale = max(den, np.linalg.norm(dual), 1e-12)
        if num <= config.rel_tol * max(den, 1e-12) and gap <= config.rel_tol * gap_scale:
            break
    return CodeState(z_freq=z_freq, code=code, dual=dual, iterations=iterations)


def reconstruct(dict_freq, code, shape: SignalShape) -> np.ndarray:
    """Sum of circular convolutions of each filter with its spatial code."""
    code_freq = forward_dft_cols(code, shape)
    rec_freq = np.einsum("pk,pk->p", np.asarray(dict_freq), code_freq)
    return inverse_dft(rec_freq, shape)


def coding_objective(x, dict_freq, code, shape: SignalShape, beta: float) -> float:
    """0.5 * ||x - reconstruction||^2 + beta * ||code||_1 at a spatial code."""
    x = np.asarray(x, dtype=np.float64).ravel()
    rec = reconstruct(dict_freq, code, shape)
    resid = x - rec
    return 0.5 * float(resid @ resid) + beta * float(np.abs(code).sum())
