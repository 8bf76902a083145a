"""Held-out evaluation: coding objective, PSNR, and filter mosaics."""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from math import ceil, sqrt

import numpy as np
from PIL import Image

from .coding import CodingConfig, coding_objective, infer_code, reconstruct
from .errors import ShapeMismatchError, UndefinedVarianceError
from .transforms import SignalShape, forward_dft_cols, pad_filter_cols

# PSNR keeps the conventional 8-bit peak even on normalized data; the run
# metadata records the scale so numbers stay comparable across runs.
PSNR_PEAK_SQ = 255.0**2


@dataclass
class EvalResult:
    """Aggregate held-out metrics plus the per-image breakdown."""

    test_objective: float
    psnr: float
    per_image_psnr: list[float] = field(default_factory=list)
    infinite_count: int = 0
    n_images: int = 0


def evaluate_dictionary(
    filters,
    samples,
    shape: SignalShape,
    coding: CodingConfig = CodingConfig(),
) -> EvalResult:
    """Code every sample against frozen filters; average objective and PSNR.

    Perfect reconstructions give +inf PSNR; those are excluded from the mean
    with a warning and reported in infinite_count.
    """
    filters = np.asarray(filters, dtype=np.float64)
    samples = np.atleast_2d(np.asarray(samples, dtype=np.float64))
    if samples.shape[1] != shape.size:
        raise ShapeMismatchError(
            f"samples must be (N, {shape.size}), got {samples.shape}"
        )
    dict_freq = forward_dft_cols(pad_filter_cols(filters, shape), shape)

    objectives = []
    psnrs = []
    infinite = 0
    for x in samples:
        state = infer_code(x, dict_freq, shape, coding)
        objectives.append(coding_objective(x, dict_freq, state.code, shape, coding.beta))
        err = float(np.sum((reconstruct(dict_freq, state.code, shape) - x) ** 2))
        if err == 0.0:
            psnrs.append(float("inf"))
            infinite += 1
        else:
            psnrs.append(10.0 * np.log10(PSNR_PEAK_SQ * shape.size / err))
    finite = [p for p in psnrs if np.isfinite(p)]
    if infinite:
        warnings.warn(
            f"{infinite} perfect reconstruction(s) excluded from the PSNR mean",
            stacklevel=2,
        )
    mean_psnr = float(np.mean(finite)) if finite else float("inf")
    return EvalResult(
        test_objective=float(np.mean(objectives)),
        psnr=mean_psnr,
        per_image_psnr=psnrs,
        infinite_count=infinite,
        n_images=samples.shape[0],
    )


def filter_variances(filters) -> np.ndarray:
    """Per-filter sample variance (the M-1 normalization)."""
    filters = np.asarray(filters, dtype=np.float64)
    if filters.shape[0] < 2:
        raise UndefinedVarianceError("variance needs at least two filter entries")
    return filters.var(axis=0, ddof=1)


def sort_filters_by_variance(filters) -> tuple[np.ndarray, np.ndarray]:
    """Columns reordered by ascending variance; ties keep original order."""
    variances = filter_variances(filters)
    order = np.argsort(variances, kind="stable")
    return np.asarray(filters)[:, order], order


def mosaic_array(filters, shape: SignalShape) -> np.ndarray:
    """Tile 2-D filters (variance order) into one uint8 grayscale canvas.

    Each tile is min-max normalized on its own; tiles are separated by
    single black pixel rows/columns, and unused grid cells stay black.
    """
    if shape.ndim != 2:
        raise ShapeMismatchError("mosaics are defined for 2-D filters only")
    filters = np.asarray(filters, dtype=np.float64)
    ordered, _ = sort_filters_by_variance(filters)
    m0, m1 = shape.filter_dims
    k = ordered.shape[1]
    cols = ceil(sqrt(k))
    rows = ceil(k / cols)
    canvas = np.zeros((rows * m0 + rows - 1, cols * m1 + cols - 1))
    for idx in range(k):
        tile = ordered[:, idx].reshape(m0, m1)
        lo, hi = tile.min(), tile.max()
        tile = np.zeros_like(tile) if hi - lo < 1e-300 else (tile - lo) / (hi - lo)
        r, c = divmod(idx, cols)
        canvas[r * (m0 + 1) : r * (m0 + 1) + m0, c * (m1 + 1) : c * (m1 + 1) + m1] = tile
    return np.round(255.0 * canvas).astype(np.uint8)


def export_mosaic(filters, shape: SignalShape, path) -> np.ndarray:
    """Write the mosaic as an 8-bit grayscale PNG; returns the pixel array."""
    canvas = mosaic_array(filters, shape)
    Image.fromarray(canvas, mode="L").save(path, format="PNG")
    return canvas
