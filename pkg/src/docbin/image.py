"""Grayscale and binary image containers, mirror indexing and file I/O.

Images are stored as float64 arrays of shape (height, width) in row-major
order.  Binary images use 1 for background (white) and 0 for text (black).
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np
from PIL import Image, UnidentifiedImageError

from .errors import ContractError, ImageFormatError

MIN_SIDE = 3


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr = np.array(arr, dtype=np.float64, copy=True)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class GrayImage:
    """Normalized scalar field with samples in [0, 1]."""

    data: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.data)
        if arr.ndim != 2:
            raise ImageFormatError(f"expected a 2-D array, got shape {arr.shape}")
        if arr.shape[0] < MIN_SIDE or arr.shape[1] < MIN_SIDE:
            raise ImageFormatError(
                f"image must be at least {MIN_SIDE}x{MIN_SIDE}, got {arr.shape[1]}x{arr.shape[0]}"
            )
        arr = _frozen(arr)
        if not np.all(np.isfinite(arr)) or arr.min() < 0.0 or arr.max() > 1.0:
            raise ImageFormatError("gray samples must lie in [0, 1]")
        object.__setattr__(self, "data", arr)

    @property
    def height(self) -> int:
        return self.data.shape[0]

    @property
    def width(self) -> int:
        return self.data.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self.data.shape

    def __array__(self, dtype=None, copy=None):
        return self.data if dtype is None else self.data.astype(dtype)


@dataclass(frozen=True, eq=False)
class BinaryImage:
    """Two-level image: 1 = background, 0 = text."""

    data: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.data)
        if arr.ndim != 2 or arr.size == 0:
            raise ImageFormatError(f"expected a non-empty 2-D array, got shape {arr.shape}")
        if not np.all((arr == 0) | (arr == 1)):
            raise ImageFormatError("binary samples must be exactly 0 or 1")
        out = np.array(arr, dtype=np.uint8, copy=True)
        out.setflags(write=False)
        object.__setattr__(self, "data", out)

    @property
    def height(self) -> int:
        return self.data.shape[0]

    @property
    def width(self) -> int:
        return self.data.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self.data.shape

    def text_mask(self) -> np.ndarray:
        return self.data == 0

    def __eq__(self, other):
        if not isinstance(other, BinaryImage):
            return NotImplemented
        return self.shape == other.shape and bool(np.array_equal(self.data, other.data))

    def __array__(self, dtype=None, copy=None):
        return self.data if dtype is None else self.data.astype(dtype)


def normalize(raw: np.ndarray) -> np.ndarray:
    """Map 8-bit samples to [0, 1]; float input already in [0, 1] is returned unchanged."""
    raw = np.asarray(raw)
    if raw.dtype == np.uint8:
        return raw.astype(np.float64) / 255.0
    return raw.astype(np.float64)


def to_luma(rgb: np.ndarray) -> np.ndarray:
    rgb = rgb.astype(np.float64)
    return 0.299 * rgb[..., 0] + 0.587 * rgb[..., 1] + 0.114 * rgb[..., 2]


def _read_raster(path) -> np.ndarray:
    path = Path(path)
    try:
        with Image.open(path) as im:
            im.load()
            mode = im.mode
            if mode in ("RGB", "RGBA", "P", "CMYK", "YCbCr"):
                arr = to_luma(np.asarray(im.convert("RGB")))
                # keep 8-bit semantics: luma of 8-bit channels is still on the 0..255 scale
                return arr / 255.0
            if mode in ("L", "LA"):
                return np.asarray(im.convert("L")).astype(np.float64) / 255.0
            if mode == "1":
                return np.asarray(im.convert("L")).astype(np.float64) / 255.0
            raise ImageFormatError(f"{path}: unsupported image mode {mode!r}")
    except FileNotFoundError:
        raise
    except UnidentifiedImageError as exc:
        raise OSError(f"{path}: not a readable PGM/PNG raster") from exc


def load_gray(path) -> GrayImage:
    """Read an 8-bit PGM/PNG (gray or RGB) and normalize to [0, 1]."""
    arr = _read_raster(path)
    if arr.size == 0:
        raise ImageFormatError(f"{path}: zero-dimension image")
    return GrayImage(np.clip(arr, 0.0, 1.0))


def load_binary(path, threshold: float = 0.5) -> BinaryImage:
    """Read a ground-truth or binarized image; samples above `threshold` become background."""
    arr = _read_raster(path)
    if arr.size == 0:
        raise ImageFormatError(f"{path}: zero-dimension image")
    return BinaryImage((arr > threshold).astype(np.uint8))


def _write_u8(path, pixels: np.ndarray) -> None:
    path = Path(path)
    if pixels.ndim != 2 or pixels.size == 0:
        raise ImageFormatError(f"cannot save image of shape {pixels.shape}")
    fmt = "PNG" if path.suffix.lower() == ".png" else "PPM"
    Image.fromarray(pixels, mode="L").save(path, format=fmt)


def save_gray(path, image: GrayImage | np.ndarray) -> None:
    """Write an image as 8-bit grayscale, rounding to the nearest level."""
    data = np.asarray(image, dtype=np.float64)
    if data.ndim != 2 or data.size == 0:
        raise ImageFormatError(f"cannot save image of shape {data.shape}")
    _write_u8(path, np.rint(np.clip(data, 0.0, 1.0) * 255.0).astype(np.uint8))


def save_binary(path, image: BinaryImage) -> None:
    """Write a binary image with levels {0, 255}."""
    data = np.asarray(image)
    if data.ndim != 2 or data.size == 0:
        raise ImageFormatError(f"cannot save image of shape {data.shape}")
    _write_u8(path, (data.astype(np.uint8) * 255))


def reflect_index(k: int, n: int) -> int:
    """Symmetric reflection of index `k` into [0, n): -1 -> 0, n -> n-1."""
    if k < -n or k >= 2 * n:
        raise ContractError(f"index {k} overhangs a length-{n} axis by more than one period")
    if k < 0:
        return -k - 1
    if k >= n:
        return 2 * n - k - 1
    return k


def reflect_sample(image, i: int, j: int) -> float:
    data = np.asarray(image)
    h, w = data.shape
    return float(data[reflect_index(i, h), reflect_index(j, w)])


def pad_reflect(field: np.ndarray, width) -> np.ndarray:
    """Mirror-extend a field; matches `reflect_sample` on every padded index."""
    return np.pad(np.asarray(field, dtype=np.float64), width, mode="symmetric")


def min_intensity(image) -> float:
    data = np.asarray(image)
    if data.size == 0:
        raise ImageFormatError("empty image")
    return float(data.min())
