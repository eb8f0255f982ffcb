"""IDX image files (the MNIST container) and digit selection."""

import gzip
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .network import PatternSet

IMAGE_MAGIC = 2051
LABEL_MAGIC = 2049
_HEADER = struct.Struct(">IIII")
_GZIP_PREFIX = b"\x1f\x8b"


class IdxFormatError(ValueError):
    pass


@dataclass(frozen=True)
class IdxImageFile:
    magic: int
    count: int
    rows: int
    cols: int
    pixels: np.ndarray  # uint8, shape (count, rows, cols)

    @property
    def d(self) -> int:
        return self.rows * self.cols


def parse_idx_images(data: bytes) -> IdxImageFile:
    """Decode an IDX3 image payload; gzip input is detected by its magic prefix."""
    data = bytes(data)
    if data[:2] == _GZIP_PREFIX:
        data = gzip.decompress(data)
    if len(data) < 4:
        raise IdxFormatError(f"truncated IDX header: {len(data)} bytes")
    (magic,) = struct.unpack_from(">I", data, 0)
    if magic != IMAGE_MAGIC:
        kind = "label file" if magic == LABEL_MAGIC else "unknown file"
        raise IdxFormatError(f"bad magic {magic} ({kind}); expected {IMAGE_MAGIC} for images")
    if len(data) < _HEADER.size:
        raise IdxFormatError(f"truncated IDX header: {len(data)} bytes")
    _, count, rows, cols = _HEADER.unpack_from(data, 0)
    if count == 0 or rows == 0 or cols == 0:
        raise IdxFormatError(f"zero dimension in header: count={count}, rows={rows}, cols={cols}")
    need = count * rows * cols
    body = memoryview(data)[_HEADER.size:]
    if len(body) < need:
        raise IdxFormatError(f"truncated payload: header promises {need} pixel bytes, found {len(body)}")
    if len(body) > need:
        raise IdxFormatError(f"{len(body) - need} trailing bytes after pixel data")
    pixels = np.frombuffer(body, dtype=np.uint8).reshape(count, rows, cols).copy()
    pixels.setflags(write=False)
    return IdxImageFile(magic, count, rows, cols, pixels)


def serialize_idx_images(images) -> bytes:
    """Inverse of :func:`parse_idx_images` (uncompressed)."""
    if isinstance(images, IdxImageFile):
        images = images.pixels
    arr = np.asarray(images)
    if arr.ndim != 3 or arr.dtype != np.uint8:
        raise ValueError("expected a uint8 array of shape (count, rows, cols)")
    return _HEADER.pack(IMAGE_MAGIC, *arr.shape) + np.ascontiguousarray(arr).tobytes()


def load_idx_images(path) -> IdxImageFile:
    return parse_idx_images(Path(path).read_bytes())


def select_patterns(file: IdxImageFile, n: int, seed: int, scale: str = "unit_interval") -> PatternSet:
    """Pick ``n`` images uniformly without replacement and flatten them to columns."""
    if n < 1 or n > file.count:
        raise ValueError(f"cannot select n={n} images from a file holding {file.count}")
    if scale not in ("unit_interval", "raw"):
        raise ValueError(f"unknown scale {scale!r}")
    rng = np.random.default_rng(seed)
    idx = rng.permutation(file.count)[:n]
    flat = file.pixels[idx].reshape(n, file.d).astype(np.float64)
    if scale == "unit_interval":
        flat /= 255.0
    return PatternSet(flat.T)
