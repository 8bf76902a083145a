"""Binary envelopes for dictionaries and preprocessed samples.

Both formats share one layout: an 8-byte magic tag, little-endian uint32
dimension metadata, a uint32 element-type tag (1 = little-endian float64),
the row-major float64 payload, and a trailing CRC32 of the payload bytes.
Dictionaries store filters contiguously (filter-major); samples store one
flattened signal.
"""

from __future__ import annotations

import struct
import zlib

import numpy as np

from .errors import (
    BadMagicError,
    ChecksumError,
    DataFileError,
    ShapeMismatchError,
    TruncatedFileError,
)

DICT_MAGIC = b"OCSCDIC1"
SAMPLE_MAGIC = b"OCSCSMP1"
_FLOAT64_TAG = 1
_U32 = struct.Struct("<I")


def _pack_header(magic: bytes, extents: tuple[int, ...], extra: tuple[int, ...]) -> bytes:
    parts = [magic, _U32.pack(len(extents))]
    parts += [_U32.pack(e) for e in extents]
    parts += [_U32.pack(e) for e in extra]
    parts.append(_U32.pack(_FLOAT64_TAG))
    return b"".join(parts)


class _Reader:
    def __init__(self, blob: bytes, path):
        self.blob = blob
        self.pos = 0
        self.path = path

    def take(self, n: int) -> bytes:
        if self.pos + n > len(self.blob):
            raise TruncatedFileError(
                f"{self.path}: file ends {self.pos + n - len(self.blob)} bytes early"
            )
        out = self.blob[self.pos : self.pos + n]
        self.pos += n
        return out

    def u32(self) -> int:
        return _U32.unpack(self.take(4))[0]


def _open(path, magic: bytes) -> _Reader:
    with open(path, "rb") as fh:
        reader = _Reader(fh.read(), path)
    found = reader.take(len(magic))
    if found != magic:
        raise BadMagicError(
            f"{path}: expected magic {magic!r}, found {found!r}"
        )
    return reader


def _read_payload(reader: _Reader, count: int) -> np.ndarray:
    raw = reader.take(count * 8)
    stored = reader.u32()
    if reader.pos != len(reader.blob):
        raise DataFileError(
            f"{reader.path}: {len(reader.blob) - reader.pos} trailing bytes after checksum"
        )
    actual = zlib.crc32(raw) & 0xFFFFFFFF
    if stored != actual:
        raise ChecksumError(
            f"{reader.path}: payload checksum {actual:#010x} does not match stored {stored:#010x}"
        )
    return np.frombuffer(raw, dtype="<f8").astype(np.float64)


def save_dictionary(filters, filter_dims: tuple[int, ...], path) -> None:
    """Write (M, K) filters with their grid extents."""
    arr = np.asarray(filters, dtype=np.float64)
    dims = tuple(int(d) for d in filter_dims)
    if arr.ndim != 2 or arr.shape[0] != int(np.prod(dims)):
        raise ShapeMismatchError(
            f"filters {arr.shape} do not match filter extents {dims}"
        )
    payload = np.ascontiguousarray(arr.T, dtype="<f8").tobytes()  # filter-major
    header = _pack_header(DICT_MAGIC, dims, (arr.shape[1],))
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(payload)
        fh.write(_U32.pack(zlib.crc32(payload) & 0xFFFFFFFF))


def load_dictionary(path) -> tuple[np.ndarray, tuple[int, ...]]:
    """Read a dictionary file back as ((M, K) filters, filter extents)."""
    reader = _open(path, DICT_MAGIC)
    n_axes = reader.u32()
    if n_axes not in (1, 2):
        raise DataFileError(f"{path}: dictionaries must be 1-D or 2-D, got {n_axes} axes")
    dims = tuple(reader.u32() for _ in range(n_axes))
    n_filters = reader.u32()
    tag = reader.u32()
    if tag != _FLOAT64_TAG:
        raise DataFileError(f"{path}: unknown element type tag {tag}")
    m = int(np.prod(dims))
    flat = _read_payload(reader, m * n_filters)
    return flat.reshape(n_filters, m).T.copy(), dims


def save_sample(signal, dims: tuple[int, ...], path) -> None:
    """Write one flattened preprocessed signal with its grid extents."""
    arr = np.asarray(signal, dtype=np.float64).ravel()
    dims = tuple(int(d) for d in dims)
    if arr.size != int(np.prod(dims)):
        raise ShapeMismatchError(f"signal size {arr.size} does not match dims {dims}")
    payload = np.ascontiguousarray(arr, dtype="<f8").tobytes()
    header = _pack_header(SAMPLE_MAGIC, dims, ())
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(payload)
        fh.write(_U32.pack(zlib.crc32(payload) & 0xFFFFFFFF))


def load_sample(path) -> tuple[np.ndarray, tuple[int, ...]]:
    """Read a sample file back as ((P,) signal, grid extents)."""
    reader = _open(path, SAMPLE_MAGIC)
    n_axes = reader.u32()
    if n_axes not in (1, 2):
        raise DataFileError(f"{path}: samples must be 1-D or 2-D, got {n_axes} axes")
    dims = tuple(reader.u32() for _ in range(n_axes))
    tag = reader.u32()
    if tag != _FLOAT64_TAG:
        raise DataFileError(f"{path}: unknown element type tag {tag}")
    flat = _read_payload(reader, int(np.prod(dims)))
    return flat, dims
