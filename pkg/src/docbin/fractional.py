"""Grünwald-Letnikov fractional gradient and the edge-stopping diffusivities."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ParameterError
from .image import pad_reflect

FLAT_FLOOR = 1e-12


@dataclass(frozen=True, eq=False)
class GLCoeffs:
    alpha: float
    K: int
    weights: np.ndarray


def gl_coeffs(alpha: float, K: int) -> GLCoeffs:
    """Weights w_k = (-1)^k binom(alpha, k), k = 0..K, via the standard recurrence."""
    if not 0.0 < alpha <= 2.0:
        raise ParameterError(f"alpha must lie in (0, 2], got {alpha}")
    if int(K) != K or K < 1:
        raise ParameterError(f"truncation K must be a positive integer, got {K}")
    K = int(K)
    w = np.empty(K + 1, dtype=np.float64)
    w[0] = 1.0
    for k in range(1, K + 1):
        w[k] = w[k - 1] * (1.0 - (alpha + 1.0) / k)
    w.setflags(write=False)
    return GLCoeffs(float(alpha), K, w)


def frac_derivatives(u, coeffs: GLCoeffs) -> tuple[np.ndarray, np.ndarray]:
    """Backward G-L differences along columns (x) and rows (y), mirror-extended."""
    u = np.asarray(u, dtype=np.float64)
    h, w = u.shape
    K = coeffs.K
    # pad only on the low side of each axis; reflection may wrap several times for tiny images
    padded = pad_reflect(u, ((K, 0), (K, 0)))
    dx = np.zeros_like(u)
    dy = np.zeros_like(u)
    for k, wk in enumerate(coeffs.weights):
        if wk == 0.0:
            continue
        dx += wk * padded[K : K + h, K - k : K - k + w]
        dy += wk * padded[K - k : K - k + h, K : K + w]
    return dx, dy


def frac_grad_mag(u, coeffs: GLCoeffs) -> np.ndarray:
    dx, dy = frac_derivatives(u, coeffs)
    return np.hypot(dx, dy)


def diffusivity(grad_mag) -> np.ndarray:
    """exp(-z^2 / zeta^2) with zeta the mean of z over the field."""
    z = np.asarray(grad_mag, dtype=np.float64)
    zeta = z.mean()
    if zeta < FLAT_FLOOR:
        return np.ones_like(z)
    return np.exp(-((z / zeta) ** 2))


def central_gradient(u) -> tuple[np.ndarray, np.ndarray]:
    """Central differences with symmetric mirror extension."""
    p = pad_reflect(u, 1)
    ux = 0.5 * (p[1:-1, 2:] - p[1:-1, :-2])
    uy = 0.5 * (p[2:, 1:-1] - p[:-2, 1:-1])
    return ux, uy


def dh_diffusivity(u) -> np.ndarray:
    """1 / (1 + |grad u|^2 / kappa) with kappa the mean squared gradient."""
    ux, uy = central_gradient(u)
    g2 = ux * ux + uy * uy
    kappa = g2.mean()
    if kappa < FLAT_FLOOR:
        return np.ones_like(g2)
    return 1.0 / (1.0 + g2 / kappa)
