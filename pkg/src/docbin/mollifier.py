"""Discrete mollifier kernel and mirror-boundary convolution."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ParameterError
from .image import pad_reflect


@dataclass(frozen=True, eq=False)
class Kernel:
    rho: float
    size: int
    # 0-based index of the kernel center (the 1-based center is half + 1)
    half: int
    weights: np.ndarray

    @property
    def center(self) -> tuple[int, int]:
        """Center in 1-based kernel coordinates."""
        return self.half + 1, self.half + 1


def kernel_half_width(rho: float) -> int:
    return math.ceil(rho / math.sqrt(2.0))


def _bump(dist2: np.ndarray, rho: float) -> np.ndarray:
    """Unnormalized mollifier rho^-2 exp(-1 / (1 - |h|^2 / rho^2)), zero for |h| >= rho."""
    ratio = dist2 / (rho * rho)
    out = np.zeros_like(ratio)
    inside = ratio < 1.0
    out[inside] = np.exp(-1.0 / (1.0 - ratio[inside])) / (rho * rho)
    return out


def build_kernel(rho: float) -> Kernel:
    """Sample the mollifier on an n x n grid, n = 2*ceil(rho/sqrt 2) + 1, normalized to sum 1."""
    if not rho > 0 or not math.isfinite(rho):
        raise ParameterError(f"kernel radius must be positive, got {rho}")
    half = kernel_half_width(rho)
    offs = np.arange(-half, half + 1, dtype=np.float64)
    dist2 = offs[:, None] ** 2 + offs[None, :] ** 2
    raw = _bump(dist2, rho)
    weights = raw / raw.sum()
    weights.setflags(write=False)
    return Kernel(rho=float(rho), size=2 * half + 1, half=half, weights=weights)


def convolve(field, kernel: Kernel) -> np.ndarray:
    """Weighted local average with symmetric mirror extension at the borders.

    Direct summation over kernel taps; the kernel is symmetric so correlation
    and convolution coincide.
    """
    f = np.asarray(field, dtype=np.float64)
    h, w = f.shape
    r = kernel.half
    padded = pad_reflect(f, r)
    out = np.zeros((h, w), dtype=np.float64)
    wts = kernel.weights
    for p in range(kernel.size):
        for q in range(kernel.size):
            wpq = wts[p, q]
            if wpq == 0.0:
                continue
            out += wpq * padded[p : p + h, q : q + w]
    return out
