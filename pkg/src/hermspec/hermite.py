"""Stable evaluation of Hermite eigenfunctions, eigenspace bookkeeping, and grids.

The one-dimensional functions h_k are the L^2(R)-normalized eigenfunctions of
the oscillator -d^2/dx^2 + x^2 with eigenvalue 2k+1.  They are evaluated
directly in normalized form by the three-term recurrence

    h_0(x) = pi^{-1/4} exp(-x^2/2)
    h_1(x) = sqrt(2) x h_0(x)
    h_k(x) = sqrt(2/k) x h_{k-1}(x) - sqrt((k-1)/k) h_{k-2}(x)

which keeps every intermediate uniformly bounded (max_k,x |h_k| <= pi^{-1/4}),
so there is no overflow and no lost Gaussian factor at any order.

d-dimensional eigenfunctions are tensor products Phi_mu(x) = prod_i h_{mu_i}(x_i)
indexed by multi-indices mu (plain tuples of non-negative ints), with
eigenvalue 2|mu| + d.  Multi-indices are always stored and enumerated in
graded-lexicographic order: ascending degree, then lexicographically with the
first entry largest first, e.g. degree 2 in two dimensions is
(2,0), (1,1), (0,2).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, List, Sequence, Tuple

import numpy as np
from scipy import special

SQRT_PI = math.sqrt(math.pi)

#: No value of |h_k|, k >= 1, exceeds this bound (the k=1 peak is ~0.6443).
HERMITE_SUP_BOUND = 0.82


# The Gaussian seed h_0 underflows for |x| > ~38.6 even though h_k is O(1)
# there once k > x^2/2, so the recurrence carries a per-point power-of-2
# exponent: h_k(x) = r_k(x) * 2^{e(x)} with r renormalized whenever it grows
# past 2^200.  Final values that still underflow are genuinely negligible
# (deep classically forbidden region) and flush to 0.
_RESCALE_THRESHOLD = 2.0**200
_RESCALE_EXP = 200.0
_HALF_LOG2E = 0.5 / math.log(2.0)


def _scaled_seed(x: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """h_0 split as r * 2^e with r = O(1): avoids the Gaussian underflow."""
    s = -(x * x) * _HALF_LOG2E
    e = np.floor(s)
    return np.pi ** -0.25 * np.exp2(s - e), e


def _recurrence_step(j: int, x, r_prev, r_cur, e):
    r_next = math.sqrt(2.0 / j) * x * r_cur - math.sqrt((j - 1.0) / j) * r_prev
    big = np.abs(r_next) > _RESCALE_THRESHOLD
    if np.any(big):
        scale = np.where(big, 2.0**-_RESCALE_EXP, 1.0)
        r_next = r_next * scale
        r_cur = r_cur * scale
        e = e + np.where(big, _RESCALE_EXP, 0.0)
    return r_cur, r_next, e


def _checked_points(x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(x)):
        raise ValueError("evaluation points must be finite")
    return x


def hermite_eval_1d(k_max: int, x) -> np.ndarray:
    """Evaluate h_0(x), ..., h_{k_max}(x) by the normalized recurrence.

    Parameters
    ----------
    k_max : int
        Highest order to evaluate (>= 0).
    x : float or ndarray
        Evaluation point(s); must be finite.

    Returns
    -------
    ndarray of shape (k_max+1,) + shape(x), axis 0 indexed by k.
    """
    if k_max < 0:
        raise ValueError(f"k_max must be >= 0, got {k_max}")
    x = _checked_points(x)
    out = np.empty((k_max + 1,) + x.shape)
    r_prev, e = _scaled_seed(x)
    out[0] = np.ldexp(r_prev, e.astype(np.int64))
    if k_max >= 1:
        r_cur = math.sqrt(2.0) * x * r_prev
        out[1] = np.ldexp(r_cur, e.astype(np.int64))
    for k in range(2, k_max + 1):
        r_prev, r_cur, e = _recurrence_step(k, x, r_prev, r_cur, e)
        out[k] = np.ldexp(r_cur, e.astype(np.int64))
    return out


def hermite_eval_single(k: int, x) -> np.ndarray:
    """Evaluate h_k(x) alone with O(1) memory (rolling recurrence).

    Same scaled recurrence as :func:`hermite_eval_1d` but only the two most
    recent orders are kept, so k in the thousands is fine on dense grids.
    """
    if k < 0:
        raise ValueError(f"k must be >= 0, got {k}")
    x = _checked_points(x)
    r_prev, e = _scaled_seed(x)
    if k == 0:
        return np.ldexp(r_prev, e.astype(np.int64))
    r_cur = math.sqrt(2.0) * x * r_prev
    for j in range(2, k + 1):
        r_prev, r_cur, e = _recurrence_step(j, x, r_prev, r_cur, e)
    return np.ldexp(r_cur, e.astype(np.int64))


def phi_eval(mu: Sequence[int], x) -> np.ndarray:
    """Tensor-product eigenfunction Phi_mu(x) = prod_i h_{mu_i}(x_i).

    ``x`` is a point in R^d (shape (d,)) or a batch of points (shape (N, d));
    for d=1 a bare scalar/1-D array is also accepted.
    """
    mu = tuple(int(m) for m in mu)
    if any(m < 0 for m in mu):
        raise ValueError(f"multi-index entries must be >= 0, got {mu}")
    d = len(mu)
    pts = np.asarray(x, dtype=float)
    pts = pts.reshape(-1, 1) if d == 1 else np.atleast_2d(pts)
    if pts.shape[-1] != d:
        raise ValueError(f"point dimension {pts.shape[-1]} does not match multi-index length {d}")
    val = np.ones(pts.shape[0])
    for i, m in enumerate(mu):
        val = val * hermite_eval_single(m, pts[:, i])
    return val if val.size > 1 else float(val[0])


def eigenvalue(k: int, d: int) -> int:
    """Oscillator eigenvalue 2k + d of the degree-k eigenspace in dimension d."""
    if k < 0:
        raise ValueError(f"k must be >= 0, got {k}")
    if d < 1:
        raise ValueError(f"d must be >= 1, got {d}")
    return 2 * k + d


@lru_cache(maxsize=None)
def enumerate_eigenspace(k: int, d: int) -> Tuple[Tuple[int, ...], ...]:
    """All multi-indices mu with |mu| = k, in graded-lexicographic order."""
    if k < 0:
        raise ValueError(f"k must be >= 0, got {k}")
    if d < 1:
        raise ValueError(f"d must be >= 1, got {d}")
    if d == 1:
        return ((k,),)
    out: List[Tuple[int, ...]] = []
    for m in range(k, -1, -1):
        for rest in enumerate_eigenspace(k - m, d - 1):
            out.append((m,) + rest)
    return tuple(out)


def eigenspace_dimension(k: int, d: int) -> int:
    """Number of multi-indices of degree k in d variables: C(k+d-1, d-1)."""
    return math.comb(k + d - 1, d - 1)


@dataclass(frozen=True)
class QuadratureRule:
    """Gauss-Hermite rule for the weight exp(-x^2) on the real line."""

    nodes: np.ndarray
    weights: np.ndarray

    def total_weights(self) -> np.ndarray:
        """Weights with the Gaussian factored back in: w_q * exp(x_q^2).

        Computed in log space; requires all raw weights to be positive, which
        holds for the node counts this artifact uses (n <= ~350).
        """
        if np.any(self.weights <= 0.0):
            raise ValueError("raw weights underflowed; node count too large for total_weights")
        return np.exp(np.log(self.weights) + self.nodes**2)


def gauss_hermite_rule(n: int) -> QuadratureRule:
    """n-point Gauss-Hermite rule, exact for x^m exp(-x^2) with m <= 2n-1.

    Nodes/weights come from scipy's Golub-Welsch solver and are then
    symmetrized exactly about 0.  Fails loudly (never degrades silently) if
    the computed rule does not satisfy the basic sanity checks.
    """
    if n < 1:
        raise ValueError(f"node count must be >= 1, got {n}")
    nodes, weights = special.roots_hermite(n)
    nodes = 0.5 * (nodes - nodes[::-1])
    weights = 0.5 * (weights + weights[::-1])
    if n % 2 == 1:
        nodes[n // 2] = 0.0
    if not (np.all(np.diff(nodes) > 0.0) and np.all(weights > 0.0)):
        raise RuntimeError(f"Gauss-Hermite solver returned an invalid rule for n={n}")
    total = weights.sum()
    if abs(total - SQRT_PI) > 1e-12 * SQRT_PI:
        raise RuntimeError(
            f"Gauss-Hermite weights for n={n} sum to {total!r}, expected sqrt(pi); solver failed"
        )
    return QuadratureRule(nodes=nodes, weights=weights)


@dataclass(frozen=True)
class GridSpec:
    """Uniform symmetric tensor grid on [-L, L]^d, plus a time-grid size.

    The time grid covers one period (-pi, pi) with N_t midpoint-shifted
    uniform points of spacing 2*pi/N_t (periodic trapezoid convention, exact
    on trigonometric polynomials of degree < N_t).
    """

    dim: int
    half_width: float
    points_per_dim: int
    time_points: int = 1

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError(f"dim must be >= 1, got {self.dim}")
        if not (self.half_width > 0.0 and math.isfinite(self.half_width)):
            raise ValueError(f"half_width must be positive and finite, got {self.half_width}")
        if self.points_per_dim < 2:
            raise ValueError(f"points_per_dim must be >= 2, got {self.points_per_dim}")
        if self.time_points < 1:
            raise ValueError(f"time_points must be >= 1, got {self.time_points}")

    def axis(self) -> np.ndarray:
        """1-D grid nodes, symmetric about 0."""
        x = np.linspace(-self.half_width, self.half_width, self.points_per_dim)
        return 0.5 * (x - x[::-1])

    def spacing(self) -> float:
        return 2.0 * self.half_width / (self.points_per_dim - 1)

    def axis_weights(self) -> np.ndarray:
        """Trapezoid quadrature weights along one axis."""
        w = np.full(self.points_per_dim, self.spacing())
        w[0] *= 0.5
        w[-1] *= 0.5
        return w

    def shape(self) -> Tuple[int, ...]:
        return (self.points_per_dim,) * self.dim

    def weight_tensor(self) -> np.ndarray:
        """Tensor-product trapezoid weights over the full grid."""
        w = self.axis_weights()
        out = w
        for _ in range(self.dim - 1):
            out = np.multiply.outer(out, w)
        return out

    def times(self) -> np.ndarray:
        """Midpoint-shifted uniform time nodes in (-pi, pi)."""
        n = self.time_points
        return -math.pi + (np.arange(n) + 0.5) * (2.0 * math.pi / n)

    def time_weight(self) -> float:
        return 2.0 * math.pi / self.time_points


def make_grid(spec: GridSpec) -> np.ndarray:
    """All tensor grid points as an array of shape (n^d, d), C order."""
    axes = [spec.axis()] * spec.dim
    mesh = np.meshgrid(*axes, indexing="ij")
    return np.stack([m.ravel() for m in mesh], axis=-1)


def default_half_width(cutoff: int, dim: int, box_scale: float = 1.0) -> float:
    """Box half-width enclosing every eigenfunction with |mu| <= cutoff.

    All such eigenfunctions concentrate inside the classical turning surface
    |x| = sqrt(2*cutoff + dim) and decay super-exponentially beyond it; the
    1.2x factor plus 5 margin pushes the truncation error below 1e-12.
    """
    return box_scale * (1.2 * math.sqrt(2.0 * cutoff + dim) + 5.0)


def default_grid(
    cutoff: int,
    dim: int,
    points_per_wavelength: float = 16.0,
    box_scale: float = 1.0,
    time_points: int | None = None,
    min_points: int = 65,
) -> GridSpec:
    """Auto-sized grid for fields band-limited at ``cutoff``.

    The local oscillation frequency of degree-k eigenfunctions is at most
    sqrt(2k+d) rad/unit, so the spacing is chosen to put
    ``points_per_wavelength`` nodes on the shortest wavelength.
    """
    half_width = default_half_width(cutoff, dim, box_scale)
    freq = math.sqrt(2.0 * cutoff + dim)
    n = int(math.ceil(2.0 * half_width * freq * points_per_wavelength / (2.0 * math.pi)))
    n = max(n, min_points)
    if n % 2 == 0:
        n += 1
    if time_points is None:
        time_points = 8 * cutoff + 16
    return GridSpec(dim=dim, half_width=half_width, points_per_dim=n, time_points=time_points)
