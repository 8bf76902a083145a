"""Frequency-domain plumbing: DFT conventions, filter padding, circular convolution.

Signals cross this package flat: a length-P signal is a (P,) vector even when
it represents an H x W image (flattened row-major), and a SignalShape carries
the geometry. The forward transform is unnormalized and the inverse carries
the full 1/P factor, so Parseval reads ||a||^2 = ||A||^2 / P. Convolution is
circular everywhere; filters live on the leading M entries of the padded grid.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import prod

import numpy as np

from .errors import NumericalConsistencyError, ShapeMismatchError

# Residue above this (scaled) bound means the input was not the spectrum of a
# real array and silently dropping the imaginary part would corrupt results.
_RESIDUE_TOL = 1e-8


@dataclass(frozen=True)
class SignalShape:
    """Geometry of one signal: grid extents and filter extents (1-D or 2-D)."""

    dims: tuple[int, ...]
    filter_dims: tuple[int, ...]

    def __post_init__(self):
        dims = tuple(int(d) for d in self.dims)
        fdims = tuple(int(d) for d in self.filter_dims)
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "filter_dims", fdims)
        if len(dims) not in (1, 2):
            raise ShapeMismatchError(f"signals must be 1-D or 2-D, got dims={dims}")
        if len(fdims) != len(dims):
            raise ShapeMismatchError(
                f"filter rank {len(fdims)} does not match signal rank {len(dims)}"
            )
        if any(d <= 0 for d in dims + fdims):
            raise ShapeMismatchError("all extents must be positive")
        if any(f > d for f, d in zip(fdims, dims)):
            raise ShapeMismatchError(
                f"filter extents {fdims} exceed signal extents {dims}"
            )

    @property
    def ndim(self) -> int:
        return len(self.dims)

    @property
    def size(self) -> int:
        """Total pixel count P."""
        return prod(self.dims)

    @property
    def filter_size(self) -> int:
        """Total filter entry count M."""
        return prod(self.filter_dims)


def _as_signal(a, shape: SignalShape, name: str = "signal") -> np.ndarray:
    arr = np.asarray(a, dtype=np.float64)
    if arr.size != shape.size:
        raise ShapeMismatchError(
            f"{name} has {arr.size} entries, expected {shape.size} for dims {shape.dims}"
        )
    return arr.reshape(shape.dims)


def _as_spectrum(a, shape: SignalShape, name: str = "spectrum") -> np.ndarray:
    arr = np.asarray(a, dtype=np.complex128)
    if arr.size != shape.size:
        raise ShapeMismatchError(
            f"{name} has {arr.size} entries, expected {shape.size} for dims {shape.dims}"
        )
    return arr.reshape(shape.dims)


def forward_dft(a, shape: SignalShape) -> np.ndarray:
    """Unnormalized DFT of a real signal, returned flat (P,) complex."""
    arr = _as_signal(a, shape)
    if shape.ndim == 1:
        return np.fft.fft(arr)
    return np.fft.fft2(arr).ravel()


def inverse_dft(a_freq, shape: SignalShape) -> np.ndarray:
    """Inverse DFT carrying the 1/P factor, returned flat (P,) real.

    The imaginary residue is discarded only after checking it is negligible
    relative to the input magnitude; anything larger raises.
    """
    arr = _as_spectrum(a_freq, shape)
    spatial = np.fft.ifft(arr) if shape.ndim == 1 else np.fft.ifft2(arr)
    _check_residue(spatial, arr)
    return spatial.real.ravel()


def _check_residue(spatial: np.ndarray, freq_in: np.ndarray) -> None:
    residue = np.abs(spatial.imag).max() if spatial.size else 0.0
    bound = _RESIDUE_TOL * (1.0 + np.abs(freq_in).max())
    if residue > bound:
        raise NumericalConsistencyError(
            f"imaginary residue {residue:.3e} exceeds bound {bound:.3e}; "
            "input is not the spectrum of a real array"
        )


def pad_filter(d, shape: SignalShape) -> np.ndarray:
    """Zero-pad an M-entry filter onto the full grid, flat (P,) real."""
    arr = np.asarray(d, dtype=np.float64)
    if arr.size != shape.filter_size:
        raise ShapeMismatchError(
            f"filter has {arr.size} entries, expected {shape.filter_size}"
        )
    out = np.zeros(shape.dims)
    if shape.ndim == 1:
        out[: shape.filter_dims[0]] = arr.ravel()
    else:
        m0, m1 = shape.filter_dims
        out[:m0, :m1] = arr.reshape(shape.filter_dims)
    return out.ravel()


def crop_filter(v, shape: SignalShape) -> np.ndarray:
    """Keep the leading filter-support entries of a padded grid, flat (M,)."""
    arr = _as_signal(v, shape, name="padded filter")
    if shape.ndim == 1:
        return arr[: shape.filter_dims[0]].copy()
    m0, m1 = shape.filter_dims
    return arr[:m0, :m1].ravel().copy()


def circular_convolve(d, z, shape: SignalShape) -> np.ndarray:
    """Circular convolution of an M-entry filter with a P-entry signal."""
    df = forward_dft(pad_filter(d, shape), shape)
    zf = forward_dft(z, shape)
    return inverse_dft(df * zf, shape)


# Column-stacked variants. Codes and dictionaries are handled as (P, K)
# arrays whose columns are independent signals sharing one geometry.


def forward_dft_cols(cols, shape: SignalShape) -> np.ndarray:
    arr = np.asarray(cols, dtype=np.float64)
    if arr.ndim != 2 or arr.shape[0] != shape.size:
        raise ShapeMismatchError(
            f"expected (P, K) = ({shape.size}, *) columns, got {arr.shape}"
        )
    if shape.ndim == 1:
        return np.fft.fft(arr, axis=0)
    h, w = shape.dims
    k = arr.shape[1]
    return np.fft.fft2(arr.reshape(h, w, k), axes=(0, 1)).reshape(shape.size, k)


def inverse_dft_cols(cols_freq, shape: SignalShape) -> np.ndarray:
    arr = np.asarray(cols_freq, dtype=np.complex128)
    if arr.ndim != 2 or arr.shape[0] != shape.size:
        raise ShapeMismatchError(
            f"expected (P, K) = ({shape.size}, *) columns, got {arr.shape}"
        )
    if shape.ndim == 1:
        spatial = np.fft.ifft(arr, axis=0)
    else:
        h, w = shape.dims
        k = arr.shape[1]
        spatial = np.fft.ifft2(arr.reshape(h, w, k), axes=(0, 1)).reshape(
            shape.size, k
        )
    _check_residue(spatial, arr)
    return spatial.real


def pad_filter_cols(filters, shape: SignalShape) -> np.ndarray:
    """Zero-pad (M, K) stacked filters to (P, K)."""
    arr = np.asarray(filters, dtype=np.float64)
    if arr.ndim != 2 or arr.shape[0] != shape.filter_size:
        raise ShapeMismatchError(
            f"expected (M, K) = ({shape.filter_size}, *) filters, got {arr.shape}"
        )
    k = arr.shape[1]
    out = np.zeros((shape.size, k))
    if shape.ndim == 1:
        out[: shape.filter_dims[0], :] = arr
    else:
        m0, m1 = shape.filter_dims
        h, w = shape.dims
        grid = out.reshape(h, w, k)
        grid[:m0, :m1, :] = arr.reshape(m0, m1, k)
        out = grid.reshape(shape.size, k)
    return out


def crop_filter_cols(padded, shape: SignalShape) -> np.ndarray:
    """Crop (P, K) padded columns back to (M, K) filter support."""
    arr = np.asarray(padded, dtype=np.float64)
    if arr.ndim != 2 or arr.shape[0] != shape.size:
        raise ShapeMismatchError(
            f"expected (P, K) = ({shape.size}, *) columns, got {arr.shape}"
        )
    k = arr.shape[1]
    if shape.ndim == 1:
        return arr[: shape.filter_dims[0], :].copy()
    m0, m1 = shape.filter_dims
    h, w = shape.dims
    return arr.reshape(h, w, k)[:m0, :m1, :].reshape(shape.filter_size, k).copy()
