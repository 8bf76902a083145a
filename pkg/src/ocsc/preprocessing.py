"""Image preparation: grayscale, local contrast normalization, edge taper."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from PIL import Image
from scipy import ndimage

from .errors import ShapeMismatchError

_LUMA = np.array([0.299, 0.587, 0.114])


@dataclass(frozen=True)
class PreprocessSpec:
    """Parameters of the fixed preprocessing chain."""

    lcn_window: int = 9
    lcn_sigma: float = 3.0
    lcn_epsilon: float = 1e-4
    taper_size: int = 11
    taper_sigma_range: tuple[float, float] = (1.0, 3.0)
    seed: int = 0


def load_image(path) -> np.ndarray:
    """Read an image file as float64, (H, W) grayscale or (H, W, 3) RGB."""
    with Image.open(path) as img:
        if img.mode not in ("L", "RGB"):
            img = img.convert("RGB")
        return np.asarray(img, dtype=np.float64)


def grayscale(image) -> np.ndarray:
    """Luminance-weighted channel mix; grayscale input passes through."""
    arr = np.asarray(image, dtype=np.float64)
    if arr.ndim == 2:
        return arr
    if arr.ndim == 3 and arr.shape[2] == 3:
        return arr @ _LUMA
    raise ShapeMismatchError(f"expected (H, W) or (H, W, 3), got {arr.shape}")


def _gaussian_kernel(size: int, sigma: float) -> np.ndarray:
    half = (size - 1) / 2.0
    xs = np.arange(size) - half
    kern = np.exp(-0.5 * (xs / sigma) ** 2)
    return kern / kern.sum()


def _separable(image: np.ndarray, kern: np.ndarray) -> np.ndarray:
    out = ndimage.correlate1d(image, kern, axis=0, mode="reflect")
    return ndimage.correlate1d(out, kern, axis=1, mode="reflect")


def local_contrast_normalize(
    image, window: int = 9, sigma: float = 3.0, epsilon: float = 1e-4
) -> np.ndarray:
    """Subtract the Gaussian-weighted local mean and divide by the local std.

    The std divisor is floored at epsilon so flat regions map to zero rather
    than blowing up.
    """
    arr = np.asarray(image, dtype=np.float64)
    kern = _gaussian_kernel(window, sigma)
    mean = _separable(arr, kern)
    var = _separable(arr * arr, kern) - mean * mean
    std = np.sqrt(np.maximum(var, 0.0))
    return (arr - mean) / np.maximum(std, epsilon)


def edge_taper(image, size: int = 11, sigma: float = 2.0) -> np.ndarray:
    """Blend a border band of the image toward its Gaussian blur.

    The blend weight ramps linearly from 0 at each edge to 1 one band
    (size pixels) in, leaving the interior untouched.
    """
    arr = np.asarray(image, dtype=np.float64)
    kern = _gaussian_kernel(size, sigma)
    blurred = _separable(arr, kern)

    def ramp(n: int) -> np.ndarray:
        idx = np.arange(n) + 0.5
        return np.minimum(np.minimum(idx, n - idx) / size, 1.0)

    weight = np.outer(ramp(arr.shape[0]), ramp(arr.shape[1]))
    return weight * arr + (1.0 - weight) * blurred


def preprocess(image, spec: PreprocessSpec = PreprocessSpec()) -> np.ndarray:
    """Grayscale, then LCN, then a seeded random-sigma edge taper."""
    gray = grayscale(image)
    normalized = local_contrast_normalize(
        gray, spec.lcn_window, spec.lcn_sigma, spec.lcn_epsilon
    )
    rng = np.random.default_rng(spec.seed)
    sigma = float(rng.uniform(*spec.taper_sigma_range))
    return edge_taper(normalized, spec.taper_size, sigma)
