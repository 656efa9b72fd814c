"""Explicit alternating solver for the background/foreground evolution.

Two models share this engine:

* ``proposed``: additive decomposition s = b + u + n, fractional-gradient
  edge-stopping diffusivity, and a source with a local-maximum force term.
* ``dh``: the multiplicative baseline s = b*u + n with the rational
  diffusivity 1 / (1 + |grad u|^2 / kappa) and no local-maximum force.

Both start from b = 1, u = s, alternate one background update and one
foreground update per iteration, and clamp u to [0, 1] after every step.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import asdict, dataclass, fields, replace
from typing import Callable, NamedTuple

import numpy as np

from .errors import ContractError, DivergenceError, ParameterError
from .fractional import diffusivity, dh_diffusivity, frac_grad_mag, gl_coeffs
from .fuzzy import ClusterFields, precompute
from .image import BinaryImage, GrayImage, min_intensity, pad_reflect

MODELS = ("proposed", "dh")
MU_TIME_SCALE = 20.0


@dataclass(frozen=True)
class SolverParams:
    a11: float = 0.1
    a12: float = 1.0
    a21: float = 0.02
    a22: float = 0.02
    a23: float = 0.5
    a24: float = 0.1
    rho: float = 8.0
    r: int = 3
    epsilon: float = 0.05
    alpha: float = 0.75
    tau: float = 0.1
    K: int = 8
    max_iters: int = 300
    rel_tol: float = 1e-4
    model: str = "proposed"
    lambda11: float = 0.1
    lambda12: float = 1.0
    lambda21: float = 0.15
    lambda22: float = 1.0
    lambda23: float = 0.5

    def __post_init__(self):
        if self.model not in MODELS:
            raise ParameterError(f"model must be one of {MODELS}, got {self.model!r}")
        if not self.tau > 0:
            raise ParameterError(f"tau must be positive, got {self.tau}")
        for name in ("a23", "lambda23"):
            v = getattr(self, name)
            if not 0.0 < v < 1.0:
                raise ParameterError(f"{name} must lie in (0, 1), got {v}")
        for name in ("a11", "a12", "a21", "a22", "a24",
                     "lambda11", "lambda12", "lambda21", "lambda22", "rel_tol"):
            v = getattr(self, name)
            if not (v >= 0 and math.isfinite(v)):
                raise ParameterError(f"{name} must be a nonnegative number, got {v}")
        if int(self.r) != self.r or self.r < 1:
            raise ParameterError(f"r must be a positive integer, got {self.r}")
        if int(self.K) != self.K or self.K < 1:
            raise ParameterError(f"K must be a positive integer, got {self.K}")
        if int(self.max_iters) != self.max_iters or self.max_iters < 0:
            raise ParameterError(f"max_iters must be a nonnegative integer, got {self.max_iters}")
        if not self.rho > 0:
            raise ParameterError(f"rho must be positive, got {self.rho}")
        if not self.epsilon > 0:
            raise ParameterError(f"epsilon must be positive, got {self.epsilon}")
        if not 0.0 < self.alpha <= 2.0:
            raise ParameterError(f"alpha must lie in (0, 2], got {self.alpha}")
        d1, d2 = self.diffusion_strengths()
        if self.tau * 4 * d1 > 1 or self.tau * 4 * d2 > 1:
            warnings.warn(
                f"tau={self.tau} exceeds the explicit stability heuristic tau*4*a <= 1",
                RuntimeWarning,
                stacklevel=3,
            )

    def diffusion_strengths(self) -> tuple[float, float]:
        if self.model == "dh":
            return self.lambda11, self.lambda21
        return self.a11, self.a21

    def replace(self, **changes) -> "SolverParams":
        return replace(self, **changes)

    def as_dict(self) -> dict:
        return asdict(self)


PARAM_FIELDS = {f.name: f for f in fields(SolverParams)}


@dataclass
class SolverState:
    b: np.ndarray
    u: np.ndarray
    cluster: ClusterFields
    s_min: float
    tau: float
    n: int = 0

    @property
    def t(self) -> float:
        return self.n * self.tau


class EvolveResult(NamedTuple):
    b: np.ndarray
    u: np.ndarray
    iterations: int


TraceHook = Callable[[int, np.ndarray, np.ndarray], None]


def init(s, params: SolverParams) -> SolverState:
    s = np.asarray(s, dtype=np.float64)
    cluster = precompute(s, params.rho, params.epsilon)
    return SolverState(
        b=np.ones_like(s),
        u=s.copy(),
        cluster=cluster,
        s_min=min_intensity(s),
        tau=params.tau,
    )


def laplacian(f: np.ndarray) -> np.ndarray:
    """Five-point Laplacian with mirror-reflected neighbours."""
    p = pad_reflect(f, 1)
    return p[2:, 1:-1] + p[:-2, 1:-1] + p[1:-1, 2:] + p[1:-1, :-2] - 4.0 * f


def background_step(state: SolverState, s, params: SolverParams) -> np.ndarray:
    s = np.asarray(s, dtype=np.float64)
    b, u = state.b, state.u
    if params.model == "dh":
        rhs = params.lambda11 * laplacian(b) + params.lambda12 * u * (s - b * u)
    else:
        rhs = params.a11 * laplacian(b) + params.a12 * u * (s - b - u)
    return b + params.tau * rhs


def divergence_flux(g: np.ndarray, u: np.ndarray) -> np.ndarray:
    """div(g grad u) with half-point diffusivities averaged from neighbours.

    Mirror extension makes the outward flux vanish at the border.
    """
    gp = pad_reflect(g, 1)
    up = pad_reflect(u, 1)
    gc = gp[1:-1, 1:-1]
    uc = up[1:-1, 1:-1]
    g_s = 0.5 * (gc + gp[2:, 1:-1])
    g_n = 0.5 * (gc + gp[:-2, 1:-1])
    g_e = 0.5 * (gc + gp[1:-1, 2:])
    g_w = 0.5 * (gc + gp[1:-1, :-2])
    return (
        g_s * (up[2:, 1:-1] - uc)
        - g_n * (uc - up[:-2, 1:-1])
        + g_e * (up[1:-1, 2:] - uc)
        - g_w * (uc - up[1:-1, :-2])
    )


def local_max(u, r: int) -> np.ndarray:
    """Maximum over the (2r+1) x (2r+1) square window, mirror-extended."""
    if int(r) != r or r < 1:
        raise ParameterError(f"window radius must be a positive integer, got {r}")
    r = int(r)
    u = np.asarray(u, dtype=np.float64)
    p = pad_reflect(u, r)
    h, w = u.shape
    rows = p[0:h, :].copy()
    for k in range(1, 2 * r + 1):
        np.maximum(rows, p[k : k + h, :], out=rows)
    out = rows[:, 0:w].copy()
    for k in range(1, 2 * r + 1):
        np.maximum(out, rows[:, k : k + w], out=out)
    return out


def mu(t: float) -> float:
    """Time ramp 1 - exp(-t/20) gating the global-floor source branch."""
    if t < 0:
        raise ParameterError(f"time must be nonnegative, got {t}")
    return -math.expm1(-t / MU_TIME_SCALE)


def _bistable(u: np.ndarray) -> np.ndarray:
    return u * (1.0 - u)


def source_term(s, u, cluster: ClusterFields, M, t: float, params: SolverParams, s_min=None):
    """Binarization source of the proposed model.

    a23*w*u(1-u)(u-c) + (1-a23)(1-w)*mu(t)*u(1-u)(u-s_min) + a24*u(1-u)(u-M)
    """
    u = np.asarray(u, dtype=np.float64)
    if s_min is None:
        s_min = min_intensity(s)
    base = _bistable(u)
    w = cluster.omega
    a23 = params.a23
    return base * (
        a23 * w * (u - cluster.c)
        + (1.0 - a23) * (1.0 - w) * mu(t) * (u - s_min)
        + params.a24 * (u - M)
    )


def dh_source_term(s, u, cluster: ClusterFields, t: float, params: SolverParams, s_min=None):
    u = np.asarray(u, dtype=np.float64)
    if s_min is None:
        s_min = min_intensity(s)
    w = cluster.omega
    lam = params.lambda23
    return _bistable(u) * (
        lam * w * (u - cluster.c) + (1.0 - lam) * (1.0 - w) * mu(t) * (u - s_min)
    )


def foreground_step(state: SolverState, s, b_next, params: SolverParams) -> np.ndarray:
    """One explicit update of u using the freshly updated background `b_next`."""
    s = np.asarray(s, dtype=np.float64)
    u = state.u
    t = state.t
    if params.model == "dh":
        g = dh_diffusivity(u)
        rhs = (
            params.lambda21 * divergence_flux(g, u)
            + params.lambda22 * b_next * (s - b_next * u)
            + dh_source_term(s, u, state.cluster, t, params, s_min=state.s_min)
        )
    else:
        g = diffusivity(frac_grad_mag(u, gl_coeffs(params.alpha, params.K)))
        M = local_max(u, params.r)
        rhs = (
            params.a21 * divergence_flux(g, u)
            + params.a22 * b_next * (s - b_next - u)
            + source_term(s, u, state.cluster, M, t, params, s_min=state.s_min)
        )
    u_next = u + params.tau * rhs
    if not np.all(np.isfinite(u_next)):
        raise DivergenceError(state.n + 1)
    return np.clip(u_next, 0.0, 1.0)


def step(state: SolverState, s, params: SolverParams) -> float:
    """Advance the state by one alternating iteration; returns the relative change of u."""
    b_next = background_step(state, s, params)
    if not np.all(np.isfinite(b_next)):
        raise DivergenceError(state.n + 1)
    u_next = foreground_step(state, s, b_next, params)
    change = np.linalg.norm(u_next - state.u) / max(np.linalg.norm(state.u), 1e-12)
    state.b, state.u = b_next, u_next
    state.n += 1
    return float(change)


def evolve(
    s,
    params: SolverParams | None = None,
    trace: TraceHook | None = None,
    trace_every: int = 0,
) -> EvolveResult:
    """Run the alternating scheme until the relative change of u drops below rel_tol."""
    params = params or SolverParams()
    if isinstance(s, GrayImage):
        s = s.data
    s = np.asarray(s, dtype=np.float64)
    state = init(s, params)
    if trace is not None and trace_every > 0:
        trace(0, state.b, state.u)
    while state.n < params.max_iters:
        change = step(state, s, params)
        if trace is not None and trace_every > 0 and state.n % trace_every == 0:
            trace(state.n, state.b, state.u)
        if change < params.rel_tol:
            break
    return EvolveResult(state.b, state.u, state.n)


def binarize(u) -> BinaryImage:
    """Hard projection: u > 0.5 is background (1), otherwise text (0)."""
    return BinaryImage((np.asarray(u) > 0.5).astype(np.uint8))


ODE_VARIANTS = ("threshold", "floor", "local_max")


def source_ode_trajectory(u0: float, value: float, variant: str, tau: float, steps: int) -> np.ndarray:
    """Forward-Euler path of du/dt = u(1-u)(u-v) for a fixed scalar v.

    `variant` names which scalar v plays: the local threshold c ("threshold"),
    the global floor s_min ("floor") or the local maximum M ("local_max").
    """
    if variant not in ODE_VARIANTS:
        raise ParameterError(f"variant must be one of {ODE_VARIANTS}, got {variant!r}")
    if not 0.0 <= u0 <= 1.0:
        raise ContractError(f"u0 must lie in [0, 1], got {u0}")
    if not 0 < tau <= 0.1:
        raise ParameterError(f"tau must lie in (0, 0.1], got {tau}")
    if steps < 1:
        raise ParameterError(f"steps must be >= 1, got {steps}")
    out = np.empty(steps + 1, dtype=np.float64)
    u = float(u0)
    out[0] = u
    for n in range(1, steps + 1):
        u = u + tau * u * (1.0 - u) * (u - value)
        out[n] = u
    return out
