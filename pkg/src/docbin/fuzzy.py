"""Local fuzzy clustering fields feeding the binarization source.

Everything here is computed once from the observed image before evolution.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ParameterError
from .mollifier import Kernel, build_kernel, convolve

DENOM_FLOOR = 1e-12


@dataclass(frozen=True, eq=False)
class ClusterFields:
    s_bar: np.ndarray
    m_F: np.ndarray
    m_B: np.ndarray
    sF_bar: np.ndarray
    sB_bar: np.ndarray
    d: np.ndarray
    omega: np.ndarray
    c: np.ndarray


def local_mean(s, kernel: Kernel) -> np.ndarray:
    return convolve(s, kernel)


def memberships(s, s_bar, eps: float) -> tuple[np.ndarray, np.ndarray]:
    """Soft text/background memberships from the deviation of s from its local mean.

    Darker-than-neighborhood pixels get m_F close to 1.
    """
    if not eps > 0:
        raise ParameterError(f"epsilon must be positive, got {eps}")
    t = 0.5 * np.tanh((np.asarray(s, dtype=np.float64) - s_bar) / eps)
    m_F = 0.5 - t
    m_B = 0.5 + t
    return m_F, m_B


def _center(s, m, kernel, fallback):
    num = convolve(m * s, kernel)
    den = convolve(m, kernel)
    out = np.array(fallback, dtype=np.float64, copy=True)
    ok = den >= DENOM_FLOOR
    out[ok] = num[ok] / den[ok]
    return out


def cluster_centers(s, m_F, m_B, kernel: Kernel, s_bar=None):
    """Membership-weighted local means of s (foreground center, background center).

    Where a membership has (numerically) no mass in the window the center
    falls back to the plain local mean.
    """
    s = np.asarray(s, dtype=np.float64)
    if s_bar is None:
        s_bar = convolve(s, kernel)
    return _center(s, m_F, kernel, s_bar), _center(s, m_B, kernel, s_bar)


def contrast_map(sF_bar, sB_bar) -> np.ndarray:
    return np.log1p(np.abs(np.asarray(sB_bar) - np.asarray(sF_bar)))


def weight_map(d) -> np.ndarray:
    """Rescale d linearly onto [0, 1]; a constant d maps to all zeros."""
    d = np.asarray(d, dtype=np.float64)
    lo, hi = d.min(), d.max()
    if hi - lo <= 0.0:
        return np.zeros_like(d)
    return (d - lo) / (hi - lo)


def threshold_map(m_F, m_B, sF_bar, sB_bar) -> np.ndarray:
    # cross pairing: background membership weights the foreground center
    return m_B * sF_bar + m_F * sB_bar


def precompute(s, rho: float, eps: float) -> ClusterFields:
    s = np.asarray(s, dtype=np.float64)
    kernel = build_kernel(rho)
    s_bar = local_mean(s, kernel)
    m_F, m_B = memberships(s, s_bar, eps)
    sF_bar, sB_bar = cluster_centers(s, m_F, m_B, kernel, s_bar=s_bar)
    d = contrast_map(sF_bar, sB_bar)
    omega = weight_map(d)
    c = threshold_map(m_F, m_B, sF_bar, sB_bar)
    return ClusterFields(s_bar, m_F, m_B, sF_bar, sB_bar, d, omega, c)
