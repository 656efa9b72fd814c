"""Synthetic degraded documents with exact ground truth.

The observation is built additively: a smooth background field, text pixels
forced to a darker level, plus clamped Gaussian noise.  Noise comes from
numpy's PCG64 generator seeded explicitly, so fixtures reproduce across
platforms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ParameterError
from .image import BinaryImage, GrayImage


@dataclass(frozen=True)
class ConstantBackground:
    level: float = 0.8

    def render(self, h: int, w: int) -> np.ndarray:
        return np.full((h, w), float(self.level))

    def min_level(self) -> float:
        return float(self.level)


@dataclass(frozen=True)
class RampBackground:
    low: float = 0.5
    high: float = 0.9
    direction: str = "x"

    def render(self, h: int, w: int) -> np.ndarray:
        if self.direction == "x":
            row = np.linspace(self.low, self.high, w)
            return np.broadcast_to(row, (h, w)).copy()
        if self.direction == "y":
            col = np.linspace(self.low, self.high, h)
            return np.broadcast_to(col[:, None], (h, w)).copy()
        raise ParameterError(f"ramp direction must be 'x' or 'y', got {self.direction!r}")

    def min_level(self) -> float:
        return float(min(self.low, self.high))


@dataclass(frozen=True)
class BlobBackground:
    """Constant paper level darkened by a Gaussian-shaped stain."""

    level: float = 0.85
    center: tuple[float, float] = (0.5, 0.5)  # (row, col) as fractions of the image size
    radius: float = 0.25  # fraction of the smaller side
    depth: float = 0.3

    def render(self, h: int, w: int) -> np.ndarray:
        yy, xx = np.mgrid[0:h, 0:w].astype(np.float64)
        cy, cx = self.center[0] * (h - 1), self.center[1] * (w - 1)
        rad = self.radius * min(h, w)
        d2 = (yy - cy) ** 2 + (xx - cx) ** 2
        return self.level - self.depth * np.exp(-d2 / (rad * rad))

    def min_level(self) -> float:
        return float(self.level - self.depth)


Background = ConstantBackground | RampBackground | BlobBackground


@dataclass(frozen=True, eq=False)
class DegradationSpec:
    base_text: BinaryImage
    background: Background = field(default_factory=ConstantBackground)
    text_level: float = 0.2
    noise_sigma: float = 0.0
    seed: int = 0
    # optional faint strokes: text pixels in this mask read weak_level instead
    weak_mask: np.ndarray | None = None
    weak_level: float | None = None

    def validate(self) -> None:
        levels = {"text_level": self.text_level, "background min": self.background.min_level()}
        if self.weak_level is not None:
            levels["weak_level"] = self.weak_level
        bg_hi = float(self.background.render(*self.base_text.shape).max())
        for name, v in list(levels.items()) + [("background max", bg_hi)]:
            if not 0.0 <= v <= 1.0:
                raise ParameterError(f"{name}={v} is outside [0, 1]")
        bg_lo = self.background.min_level()
        for name in ("text_level", "weak_level"):
            v = levels.get(name)
            if v is not None and not v < bg_lo:
                raise ParameterError(
                    f"H2 violated: {name}={v} must be darker than every background level (min {bg_lo})"
                )
        if self.noise_sigma < 0:
            raise ParameterError(f"noise_sigma must be nonnegative, got {self.noise_sigma}")
        if (self.weak_mask is None) != (self.weak_level is None):
            raise ParameterError("weak_mask and weak_level must be given together")
        if self.weak_mask is not None and np.shape(self.weak_mask) != self.base_text.shape:
            raise ParameterError("weak_mask shape does not match base_text")


def render(spec: DegradationSpec) -> tuple[GrayImage, BinaryImage]:
    """Build s = clamp(b + u + noise) and return it with the ground truth."""
    spec.validate()
    gt = spec.base_text
    h, w = gt.shape
    b = spec.background.render(h, w)
    text_levels = np.full((h, w), float(spec.text_level))
    if spec.weak_mask is not None:
        text_levels[np.asarray(spec.weak_mask, dtype=bool)] = spec.weak_level
    # b + u with u = 0 on background and u = level - b on text, written without rounding
    s = np.where(gt.text_mask(), text_levels, b)
    if spec.noise_sigma > 0:
        rng = np.random.default_rng(spec.seed)
        s = s + rng.normal(0.0, spec.noise_sigma, size=s.shape)
    return GrayImage(np.clip(s, 0.0, 1.0)), gt


def _layout(width: int, height: int, stroke_width: int, count: int):
    k = math.ceil(math.sqrt(count))
    cell_h, cell_w = height // k, width // k
    gap = max(1, stroke_width)
    length = min(cell_h, cell_w) - 2 * gap
    return k, cell_h, cell_w, length


def bar_length(width: int, height: int, stroke_width: int, count: int) -> int:
    """Length in pixels of every bar drawn by `glyph_bar_chart`."""
    if count == 0:
        return 0
    return _layout(width, height, stroke_width, count)[3]


def glyph_bar_chart(width: int, height: int, stroke_width: int, count: int) -> BinaryImage:
    """Deterministic stand-in for glyphs: `count` bars in a grid, alternating horizontal/vertical.

    Every bar is `stroke_width` thick and `bar_length(...)` long, centered in its cell.
    """
    if width < 1 or height < 1 or stroke_width < 1 or count < 0:
        raise ParameterError("width, height and stroke_width must be positive, count nonnegative")
    img = np.ones((height, width), dtype=np.uint8)
    if count == 0:
        return BinaryImage(img)
    k, cell_h, cell_w, length = _layout(width, height, stroke_width, count)
    if length < 1 or stroke_width > min(cell_h, cell_w) - 2:
        raise ParameterError(
            f"{count} bars of stroke {stroke_width} do not fit in {width}x{height}"
        )
    for idx in range(count):
        row, col = divmod(idx, k)
        top, left = row * cell_h, col * cell_w
        if idx % 2 == 0:
            r0 = top + (cell_h - stroke_width) // 2
            c0 = left + (cell_w - length) // 2
            img[r0 : r0 + stroke_width, c0 : c0 + length] = 0
        else:
            r0 = top + (cell_h - length) // 2
            c0 = left + (cell_w - stroke_width) // 2
            img[r0 : r0 + length, c0 : c0 + stroke_width] = 0
    return BinaryImage(img)
