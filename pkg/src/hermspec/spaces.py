"""Norms built on the oscillator projection family.

Spatial L^p norms use tensor trapezoid quadrature on the box (grid max for
p = infinity).  Time norms live on one period (-pi, pi) and use the periodic
trapezoid rule, which is exact on trigonometric polynomials below the grid's
Nyquist degree -- with the default oversampling this makes the q = 2 time
norm of band-limited evolutions exact to rounding.

The smoothness scales weight the degree-k projection by the oscillator
eigenvalue lam_k = 2k + d (never by the bare index k, whose k = 0 term would
degenerate), so the quadratic Sobolev scale coincides exactly with the
(2, 2) Triebel-Lizorkin scale at every order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from .hermite import GridSpec
from .transform import SampledField, SpectralField, projection_values


@dataclass(frozen=True)
class MixedNormSpec:
    """Mixed-norm exponents and nesting order.

    ``x_then_t`` is the inner-time/outer-space norm || ||u(., x)||_{L^q_t} ||_{L^p_x};
    ``t_then_x`` is the reverse nesting.
    """

    p: float
    q: float
    order: str = "x_then_t"

    def __post_init__(self):
        if not self.p >= 1.0:
            raise ValueError(f"p must be >= 1, got {self.p}")
        if not (self.q >= 1.0 and math.isfinite(self.q)):
            raise ValueError(f"q must be in [1, inf), got {self.q}")
        if self.order not in ("x_then_t", "t_then_x"):
            raise ValueError(f"unknown nesting order {self.order!r}")


@dataclass(frozen=True)
class SpaceTimeSamples:
    """Complex samples on (time grid) x (spatial tensor grid)."""

    grid: GridSpec
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=complex)
        expected = (self.grid.time_points,) + self.grid.shape()
        if v.shape != expected:
            raise ValueError(f"value array shape {v.shape} does not match {expected}")
        object.__setattr__(self, "values", v)

    def times(self) -> np.ndarray:
        return self.grid.times()


def _grid_lp(values: np.ndarray, grid: GridSpec, p: float) -> float:
    """(integral |values|^p)^(1/p) over the box; grid max for p = inf."""
    mag = np.abs(values)
    if mag.size == 0:
        raise ValueError("empty grid")
    if math.isinf(p):
        return float(np.max(mag))
    w = grid.weight_tensor()
    return float(np.sum(w * mag**p) ** (1.0 / p))


def lp_norm(f: SampledField, p: float) -> float:
    """Spatial L^p norm of a sampled field, p in [1, inf]."""
    if not p >= 1.0:
        raise ValueError(f"p must be >= 1, got {p}")
    return _grid_lp(f.values, f.grid, p)


def time_norms(values: np.ndarray, q: float, dt: float) -> np.ndarray:
    """Periodic-trapezoid L^q time norm along axis 0, one value per space point."""
    if not (q >= 1.0 and math.isfinite(q)):
        raise ValueError(f"q must be in [1, inf), got {q}")
    return np.sum(np.abs(values) ** q, axis=0) ** (1.0 / q) * dt ** (1.0 / q)


def mixed_norm(u: SpaceTimeSamples, spec: MixedNormSpec) -> float:
    """Mixed space-time norm in the requested nesting order."""
    dt = u.grid.time_weight()
    if spec.order == "x_then_t":
        inner = time_norms(u.values, spec.q, dt)
        return _grid_lp(inner, u.grid, spec.p)
    # t_then_x: spatial norm at each time, then the time norm of that profile
    flat = u.values.reshape(u.grid.time_points, -1)
    if math.isinf(spec.p):
        profile = np.max(np.abs(flat), axis=1)
    else:
        w = u.grid.weight_tensor().ravel()
        profile = np.sum(w * np.abs(flat) ** spec.p, axis=1) ** (1.0 / spec.p)
    return float(np.sum(profile**spec.q) ** (1.0 / spec.q) * dt ** (1.0 / spec.q))


def triebel_norm(field: SpectralField, r: float, p: float, q: float,
                 grid: GridSpec | None = None) -> float:
    """Triebel-Lizorkin norm over the projection family.

    || ( sum_k lam_k^{r q} |P_k f(x)|^q )^{1/q} ||_{L^p(box)} with
    lam_k = 2k + d; q = inf takes the sup over k, p = inf the grid max.
    Exponents may lie anywhere in (0, inf] (quasinorm range included).
    """
    if not p > 0.0:
        raise ValueError(f"p must be > 0, got {p}")
    if not q > 0.0:
        raise ValueError(f"q must be > 0, got {q}")
    if grid is None:
        from .hermite import default_grid

        grid = default_grid(field.cutoff, field.dim)
    degrees, proj = projection_values(field, grid)
    if degrees.size == 0:
        return 0.0
    lam = (2 * degrees + field.dim).astype(float)
    mag = np.abs(proj)
    if math.isinf(q):
        aggregate = np.max(lam.reshape((-1,) + (1,) * field.dim) ** r * mag, axis=0)
    else:
        weights = lam ** (r * q)
        aggregate = np.tensordot(weights, mag**q, axes=([0], [0])) ** (1.0 / q)
    if math.isinf(p):
        return float(np.max(aggregate))
    w = grid.weight_tensor()
    return float(np.sum(w * aggregate**p) ** (1.0 / p))


def sobolev_norm(field: SpectralField, s: float) -> float:
    """Hermite-Sobolev norm (sum_k lam_k^{2s} ||P_k f||_2^2)^(1/2), in coefficient space."""
    lam = field.eigenvalues().astype(float)
    c = field.coeffs
    return math.sqrt(float(np.sum(lam ** (2.0 * s) * (c.real**2 + c.imag**2))))
