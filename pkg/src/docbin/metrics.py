"""DIBCO-style scores of a binarized page against its ground truth.

Convention: 0 = text (the positive class), 1 = background.

The pseudo F-measure here uses skeleton-based pseudo-recall with plain
precision; DIBCO's weighted pseudo-precision is not implemented, so Fps
values are close in spirit to the official tool but not bit-identical.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .errors import ContractError, MetricUndefinedError

PSNR_CAP = 99.0
DRD_BLOCK = 8
REPORT_FIELDS = ("fm", "fps", "psnr", "drd", "tp", "fp", "fn", "tn")


@dataclass(frozen=True)
class MetricsReport:
    fm: float
    fps: float
    psnr: float
    drd: float
    tp: int
    fp: int
    fn: int
    tn: int

    def as_dict(self) -> dict:
        return {k: getattr(self, k) for k in REPORT_FIELDS}

    def to_json(self) -> str:
        return json.dumps(self.as_dict())

    def csv_row(self) -> list[str]:
        return [_fmt(getattr(self, k)) for k in REPORT_FIELDS]


def _fmt(v) -> str:
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return f"{v:.4f}"


def _arrays(bin_img, gt) -> tuple[np.ndarray, np.ndarray]:
    b = np.asarray(bin_img)
    g = np.asarray(gt)
    if b.shape != g.shape:
        raise ContractError(f"dimension mismatch: {b.shape} vs {g.shape}")
    return b.astype(np.uint8), g.astype(np.uint8)


def drd_weights() -> np.ndarray:
    """5x5 inverse-distance weights with a zero center, normalized to sum 1."""
    off = np.arange(-2, 3, dtype=np.float64)
    dist = np.hypot(off[:, None], off[None, :])
    w = np.zeros_like(dist)
    nz = dist > 0
    w[nz] = 1.0 / dist[nz]
    return w / w.sum()


def confusion(bin_img, gt) -> tuple[int, int, int, int]:
    b, g = _arrays(bin_img, gt)
    bt, gtx = b == 0, g == 0
    tp = int(np.count_nonzero(bt & gtx))
    fp = int(np.count_nonzero(bt & ~gtx))
    fn = int(np.count_nonzero(~bt & gtx))
    tn = b.size - tp - fp - fn
    return tp, fp, fn, tn


def _harmonic(recall: float, precision: float) -> float:
    if recall + precision == 0:
        return 0.0
    return 100.0 * 2.0 * recall * precision / (recall + precision)


def f_measure(bin_img, gt) -> float:
    tp, fp, fn, _ = confusion(bin_img, gt)
    if tp + fn == 0:
        raise MetricUndefinedError("ground truth contains no text pixels")
    if tp == 0:
        return 0.0
    return _harmonic(tp / (tp + fn), tp / (tp + fp))


_NEIGHBOR_OFFSETS = [(-1, 0), (-1, 1), (0, 1), (1, 1), (1, 0), (1, -1), (0, -1), (-1, -1)]


def skeletonize(mask) -> np.ndarray:
    """Zhang-Suen thinning of a boolean mask (True = foreground)."""
    img = np.pad(np.asarray(mask, dtype=bool), 1).astype(np.uint8)
    h, w = img.shape
    while True:
        changed = False
        for sub in (0, 1):
            c = img[1:-1, 1:-1]
            p = [img[1 + di : h - 1 + di, 1 + dj : w - 1 + dj] for di, dj in _NEIGHBOR_OFFSETS]
            p2, p3, p4, p5, p6, p7, p8, p9 = p
            nb = sum(x.astype(np.int32) for x in p)
            seq = p + [p2]
            trans = sum(((seq[k] == 0) & (seq[k + 1] == 1)).astype(np.int32) for k in range(8))
            if sub == 0:
                cond = (p2 * p4 * p6 == 0) & (p4 * p6 * p8 == 0)
            else:
                cond = (p2 * p4 * p8 == 0) & (p2 * p6 * p8 == 0)
            drop = (c == 1) & (nb >= 2) & (nb <= 6) & (trans == 1) & cond
            if drop.any():
                img[1:-1, 1:-1][drop] = 0
                changed = True
        if not changed:
            return img[1:-1, 1:-1].astype(bool)


def pseudo_recall(bin_img, gt) -> float:
    b, g = _arrays(bin_img, gt)
    skel = skeletonize(g == 0)
    total = int(skel.sum())
    if total == 0:
        raise MetricUndefinedError("ground truth contains no text pixels")
    return int(np.count_nonzero(skel & (b == 0))) / total


def pseudo_f(bin_img, gt) -> float:
    tp, fp, fn, _ = confusion(bin_img, gt)
    if tp + fn == 0:
        raise MetricUndefinedError("ground truth contains no text pixels")
    if tp == 0:
        return 0.0
    return _harmonic(pseudo_recall(bin_img, gt), tp / (tp + fp))


def psnr(bin_img, gt) -> float:
    b, g = _arrays(bin_img, gt)
    mse = np.count_nonzero(b != g) / b.size
    if mse == 0:
        return PSNR_CAP
    return min(PSNR_CAP, 10.0 * math.log10(1.0 / mse))


def nubn(gt) -> int:
    """Number of full 8x8 ground-truth blocks containing both text and background."""
    g = np.asarray(gt)
    h, w = (g.shape[0] // DRD_BLOCK) * DRD_BLOCK, (g.shape[1] // DRD_BLOCK) * DRD_BLOCK
    if h == 0 or w == 0:
        raise ContractError("image smaller than one 8x8 block")
    blocks = g[:h, :w].reshape(h // DRD_BLOCK, DRD_BLOCK, w // DRD_BLOCK, DRD_BLOCK)
    lo = blocks.min(axis=(1, 3))
    hi = blocks.max(axis=(1, 3))
    return int(np.count_nonzero(lo != hi))


def drd(bin_img, gt) -> float:
    """Distance-reciprocal distortion: weighted 5x5 disagreement summed over flipped pixels / NUBN."""
    b, g = _arrays(bin_img, gt)
    n = nubn(g)
    if n == 0:
        raise MetricUndefinedError("ground truth has no non-uniform 8x8 block")
    wts = drd_weights()
    gp = np.pad(g.astype(np.float64), 2, mode="symmetric")
    h, w = g.shape
    flipped = b != g
    if not flipped.any():
        return 0.0
    bk = b.astype(np.float64)
    acc = np.zeros((h, w))
    for p in range(5):
        for q in range(5):
            if wts[p, q] == 0.0:
                continue
            acc += wts[p, q] * np.abs(gp[p : p + h, q : q + w] - bk)
    return float(acc[flipped].sum() / n)


def evaluate(bin_img, gt) -> MetricsReport:
    tp, fp, fn, tn = confusion(bin_img, gt)
    return MetricsReport(
        fm=f_measure(bin_img, gt),
        fps=pseudo_f(bin_img, gt),
        psnr=psnr(bin_img, gt),
        drd=drd(bin_img, gt),
        tp=tp,
        fp=fp,
        fn=fn,
        tn=tn,
    )
