"""Hermite analysis/synthesis, spectral projections, and spectral multipliers.

A function band-limited at cutoff K is represented by its coefficient table
c_mu = <f, Phi_mu> over all multi-indices |mu| <= K (a :class:`SpectralField`).
All operators act on that fixed window and never silently extend K: asking
for a projection beyond the cutoff is an error, which keeps truncation error
auditable.

Coefficients are always stored in graded-lexicographic index order; that
fixed order is also the reduction order of every sum, so results are
reproducible bit-for-bit across runs.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Mapping, Sequence, Tuple

import numpy as np

from .hermite import (
    GridSpec,
    QuadratureRule,
    enumerate_eigenspace,
    gauss_hermite_rule,
    hermite_eval_1d,
)

#: Eigenspace sizes grow like k^(d-1); beyond d=4 desk-scale runtimes are gone.
MAX_DEFAULT_DIM = 4


def _check_dim(dim: int, allow_large_dim: bool) -> None:
    if dim < 1:
        raise ValueError(f"dim must be >= 1, got {dim}")
    if dim > MAX_DEFAULT_DIM and not allow_large_dim:
        raise ValueError(
            f"dim={dim} exceeds the default limit {MAX_DEFAULT_DIM}; "
            "pass allow_large_dim=True to override"
        )


@lru_cache(maxsize=None)
def all_indices(dim: int, cutoff: int) -> Tuple[Tuple[int, ...], ...]:
    """All multi-indices with |mu| <= cutoff, graded-lexicographic order."""
    if cutoff < 0:
        raise ValueError(f"cutoff must be >= 0, got {cutoff}")
    out = []
    for k in range(cutoff + 1):
        out.extend(enumerate_eigenspace(k, dim))
    return tuple(out)


@lru_cache(maxsize=None)
def _degree_table(dim: int, cutoff: int) -> np.ndarray:
    deg = np.array([sum(mu) for mu in all_indices(dim, cutoff)], dtype=int)
    deg.setflags(write=False)
    return deg


@lru_cache(maxsize=None)
def _position_map(dim: int, cutoff: int) -> Mapping[Tuple[int, ...], int]:
    return {mu: i for i, mu in enumerate(all_indices(dim, cutoff))}


@dataclass(frozen=True)
class SpectralField:
    """Truncated Hermite coefficient table {c_mu : |mu| <= cutoff}."""

    dim: int
    cutoff: int
    coeffs: np.ndarray

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError(f"dim must be >= 1, got {self.dim}")
        if self.cutoff < 0:
            raise ValueError(f"cutoff must be >= 0, got {self.cutoff}")
        c = np.asarray(self.coeffs, dtype=complex)
        n = len(all_indices(self.dim, self.cutoff))
        if c.shape != (n,):
            raise ValueError(
                f"coefficient table has shape {c.shape}, expected ({n},) "
                f"for dim={self.dim}, cutoff={self.cutoff}"
            )
        if not np.all(np.isfinite(c.view(float))):
            raise ValueError("coefficients must be finite")
        object.__setattr__(self, "coeffs", c)

    @classmethod
    def zero(cls, dim: int, cutoff: int, allow_large_dim: bool = False) -> "SpectralField":
        _check_dim(dim, allow_large_dim)
        n = len(all_indices(dim, cutoff))
        return cls(dim=dim, cutoff=cutoff, coeffs=np.zeros(n, dtype=complex))

    @classmethod
    def basis(cls, mu: Sequence[int], cutoff: int | None = None,
              allow_large_dim: bool = False) -> "SpectralField":
        """The pure eigenfunction Phi_mu as a field (c_mu = 1)."""
        mu = tuple(int(m) for m in mu)
        if any(m < 0 for m in mu):
            raise ValueError(f"multi-index entries must be >= 0, got {mu}")
        if cutoff is None:
            cutoff = sum(mu)
        if sum(mu) > cutoff:
            raise ValueError(f"|mu|={sum(mu)} exceeds cutoff={cutoff}")
        field = cls.zero(len(mu), cutoff, allow_large_dim)
        field.coeffs[_position_map(len(mu), cutoff)[mu]] = 1.0
        return field

    @property
    def indices(self) -> Tuple[Tuple[int, ...], ...]:
        return all_indices(self.dim, self.cutoff)

    @property
    def degrees(self) -> np.ndarray:
        return _degree_table(self.dim, self.cutoff)

    def coeff(self, mu: Sequence[int]) -> complex:
        pos = _position_map(self.dim, self.cutoff).get(tuple(int(m) for m in mu))
        if pos is None:
            raise KeyError(f"multi-index {tuple(mu)} outside the |mu| <= {self.cutoff} window")
        return complex(self.coeffs[pos])

    def with_coeffs(self, coeffs: np.ndarray) -> "SpectralField":
        return SpectralField(dim=self.dim, cutoff=self.cutoff, coeffs=coeffs)

    def l2_norm(self) -> float:
        """Parseval norm (sum |c_mu|^2)^(1/2) at the truncated level."""
        c = self.coeffs
        return math.sqrt(float(np.sum(c.real**2 + c.imag**2)))

    def eigenvalues(self) -> np.ndarray:
        """Per-coefficient oscillator eigenvalue 2|mu| + d."""
        return 2 * self.degrees + self.dim

    # -- serialization: JSON with entries [[mu...], re, im] in graded-lex order

    def to_json_dict(self) -> dict:
        return {
            "dim": self.dim,
            "cutoff": self.cutoff,
            "coeffs": [
                [list(mu), float(c.real), float(c.imag)]
                for mu, c in zip(self.indices, self.coeffs)
            ],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict())

    @classmethod
    def from_json_dict(cls, payload: dict, allow_large_dim: bool = False) -> "SpectralField":
        dim = int(payload["dim"])
        cutoff = int(payload["cutoff"])
        _check_dim(dim, allow_large_dim)
        expected = all_indices(dim, cutoff)
        entries = payload["coeffs"]
        if len(entries) != len(expected):
            raise ValueError(
                f"serialized table has {len(entries)} entries, expected {len(expected)}"
            )
        coeffs = np.empty(len(expected), dtype=complex)
        for i, (mu, re, im) in enumerate(entries):
            if tuple(mu) != expected[i]:
                raise ValueError(
                    f"serialized index {tuple(mu)} at position {i} violates graded-lex order"
                )
            coeffs[i] = complex(re, im)
        return cls(dim=dim, cutoff=cutoff, coeffs=coeffs)

    @classmethod
    def from_json(cls, text: str, allow_large_dim: bool = False) -> "SpectralField":
        return cls.from_json_dict(json.loads(text), allow_large_dim)


@dataclass(frozen=True)
class SampledField:
    """Complex values of a function on the tensor spatial grid of ``grid``."""

    grid: GridSpec
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=complex)
        if v.shape != self.grid.shape():
            raise ValueError(f"value array shape {v.shape} does not match grid {self.grid.shape()}")
        object.__setattr__(self, "values", v)

    def l2_norm(self) -> float:
        w = self.grid.weight_tensor()
        return math.sqrt(float(np.sum(w * np.abs(self.values) ** 2)))

    def boundary_max(self) -> float:
        """Largest |value| on the boundary faces of the box."""
        v = np.abs(self.values)
        faces = []
        for axis in range(v.ndim):
            faces.append(np.max(np.take(v, 0, axis=axis)))
            faces.append(np.max(np.take(v, -1, axis=axis)))
        return float(max(faces))


def _basis_matrices(cutoff: int, grid: GridSpec) -> np.ndarray:
    """h_k values on the grid axis: shape (cutoff+1, n).  Same for every axis."""
    return hermite_eval_1d(cutoff, grid.axis())


def analyze(
    f,
    cutoff: int,
    dim: int | None = None,
    rule: QuadratureRule | None = None,
    allow_large_dim: bool = False,
) -> SpectralField:
    """Hermite coefficients c_mu = <f, Phi_mu> for all |mu| <= cutoff.

    ``f`` is either a callable or a :class:`SampledField`.

    * Callable: integrated with a tensor Gauss-Hermite rule of 2*cutoff+16
      nodes per dimension (Gaussian weight factored out), which is exact for
      f in the span of {Phi_mu : |mu| <= cutoff}.  For dim=1 the callable
      receives a 1-D array of abscissas; for dim>=2 an array of shape (N, d).
      Scalar-only callables are detected and looped over.
    * SampledField: integrated with tensor trapezoid weights on its own grid
      (dim is taken from the grid).
    """
    if cutoff < 0:
        raise ValueError(f"cutoff must be >= 0, got {cutoff}")

    if isinstance(f, SampledField):
        grid = f.grid
        dim = grid.dim
        _check_dim(dim, allow_large_dim)
        basis = _basis_matrices(cutoff, grid)
        weighted = f.grid.axis_weights() * basis  # (K+1, n)
        dense = _contract_axes(weighted, f.values, dim)
        return _field_from_dense(dense, dim, cutoff)

    if dim is None:
        raise ValueError("dim is required when analyzing a callable")
    _check_dim(dim, allow_large_dim)
    if rule is None:
        rule = gauss_hermite_rule(2 * cutoff + 16)
    nodes = rule.nodes
    lam = rule.total_weights()
    n = nodes.size

    if dim == 1:
        vals = _eval_callable(f, nodes)
    else:
        mesh = np.meshgrid(*([nodes] * dim), indexing="ij")
        pts = np.stack([m.ravel() for m in mesh], axis=-1)
        vals = _eval_callable(f, pts).reshape((n,) * dim)
    if not np.all(np.isfinite(np.asarray(vals, dtype=complex).view(float))):
        raise ValueError("function returned non-finite values at quadrature nodes")

    basis = hermite_eval_1d(cutoff, nodes)  # (K+1, n)
    weighted = lam * basis
    tensor = np.asarray(vals, dtype=complex).reshape((n,) * dim)
    dense = _contract_axes(weighted, tensor, dim)
    return _field_from_dense(dense, dim, cutoff)


def _contract_axes(mat: np.ndarray, tensor: np.ndarray, dim: int) -> np.ndarray:
    """Apply ``mat`` (rows x nodes) along every axis of a (nodes,)^dim tensor."""
    for _ in range(dim):
        tensor = np.moveaxis(np.tensordot(mat, tensor, axes=([1], [0])), 0, dim - 1)
    return tensor


def _eval_callable(f: Callable, pts: np.ndarray) -> np.ndarray:
    try:
        vals = np.asarray(f(pts), dtype=complex)
        if vals.shape == pts.shape[:1] or (pts.ndim == 1 and vals.shape == pts.shape):
            return vals
    except (TypeError, ValueError):
        pass
    if pts.ndim == 1:
        return np.array([f(float(p)) for p in pts], dtype=complex)
    return np.array([f(p) for p in pts], dtype=complex)


def _field_from_dense(dense: np.ndarray, dim: int, cutoff: int) -> SpectralField:
    """Select the |mu| <= cutoff entries of a dense (K+1,)^d tensor."""
    idx = all_indices(dim, cutoff)
    sel = tuple(np.array([mu[i] for mu in idx]) for i in range(dim))
    return SpectralField(dim=dim, cutoff=cutoff, coeffs=dense[sel])


def _dense_from_field(field: SpectralField) -> np.ndarray:
    dense = np.zeros((field.cutoff + 1,) * field.dim, dtype=complex)
    idx = field.indices
    sel = tuple(np.array([mu[i] for mu in idx]) for i in range(field.dim))
    dense[sel] = field.coeffs
    return dense


def synthesize(field: SpectralField, grid: GridSpec) -> SampledField:
    """Pointwise sum_mu c_mu Phi_mu(x) on the tensor grid."""
    if grid.dim != field.dim:
        raise ValueError(f"grid dim {grid.dim} does not match field dim {field.dim}")
    basis = _basis_matrices(field.cutoff, grid)
    tensor = _dense_from_field(field)
    for _ in range(field.dim):
        # consume the leading coefficient axis; grid axes accumulate at the end
        tensor = np.tensordot(tensor, basis, axes=([0], [0]))
    return SampledField(grid=grid, values=tensor)


def projection_values(
    field: SpectralField, grid: GridSpec
) -> Tuple[np.ndarray, np.ndarray]:
    """Evaluate every nonvanishing projection P_k f on the grid.

    Returns ``(degrees, vals)`` where ``degrees`` lists the degrees k whose
    coefficient block is not identically zero and ``vals[i]`` is P_{k_i} f on
    the grid.  Skipping the all-zero blocks is what keeps single-eigenspace
    probes cheap at degree ~1000.
    """
    if grid.dim != field.dim:
        raise ValueError(f"grid dim {grid.dim} does not match field dim {field.dim}")
    basis = _basis_matrices(field.cutoff, grid)
    deg = field.degrees
    active = [k for k in range(field.cutoff + 1) if np.any(field.coeffs[deg == k] != 0.0)]
    out = np.zeros((len(active),) + grid.shape(), dtype=complex)
    for i, k in enumerate(active):
        rows = np.nonzero(deg == k)[0]
        mus = [field.indices[r] for r in rows]
        c = field.coeffs[rows]
        if field.dim == 1:
            out[i] = c[0] * basis[k]
            continue
        operands = []
        subs = []
        for axis in range(field.dim):
            operands.append(basis[np.array([mu[axis] for mu in mus])])
            subs.append(f"m{'ijkl'[axis]}")
        expr = "m," + ",".join(subs) + "->" + "ijkl"[: field.dim]
        out[i] = np.einsum(expr, c, *operands)
    return np.array(active, dtype=int), out


def project(field: SpectralField, k: int) -> SpectralField:
    """Orthogonal projection P_k: keep exactly the coefficients with |mu| = k."""
    if k < 0 or k > field.cutoff:
        raise ValueError(f"k={k} outside the truncation window [0, {field.cutoff}]")
    coeffs = np.where(field.degrees == k, field.coeffs, 0.0)
    return field.with_coeffs(coeffs)


def kernel_phi_k(k: int, x, y, d: int) -> float:
    """Projection kernel sum over |mu| = k of Phi_mu(x) Phi_mu(y)."""
    if k < 0:
        raise ValueError(f"k must be >= 0, got {k}")
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    ys = np.atleast_1d(np.asarray(y, dtype=float))
    if xs.shape != (d,) or ys.shape != (d,):
        raise ValueError(f"points must have shape ({d},), got {xs.shape} and {ys.shape}")
    hx = hermite_eval_1d(k, xs)  # (k+1, d)
    hy = hermite_eval_1d(k, ys)
    mus = np.array(enumerate_eigenspace(k, d))  # (m, d)
    cols = np.arange(d)
    px = np.prod(hx[mus, cols], axis=1)
    py = np.prod(hy[mus, cols], axis=1)
    return float(np.sum(px * py))


def mehler_closed_form(omega: float, x, y, d: int) -> float:
    """Closed form of the generating series sum_k omega^k Phi_k(x, y), |omega| < 1.

    Equals pi^(-d/2) (1-w^2)^(-d/2)
           exp(-(1/2)(1+w^2)/(1-w^2) (|x|^2+|y|^2) + 2w/(1-w^2) x.y).
    """
    if not abs(omega) < 1.0:
        raise ValueError(f"|omega| must be < 1, got {omega}")
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    ys = np.atleast_1d(np.asarray(y, dtype=float))
    if xs.shape != (d,) or ys.shape != (d,):
        raise ValueError(f"points must have shape ({d},), got {xs.shape} and {ys.shape}")
    w2 = omega * omega
    quad = -0.5 * (1.0 + w2) / (1.0 - w2) * (xs @ xs + ys @ ys)
    cross = 2.0 * omega / (1.0 - w2) * (xs @ ys)
    return float(math.pi ** (-0.5 * d) * (1.0 - w2) ** (-0.5 * d) * math.exp(quad + cross))


def apply_multiplier(field: SpectralField, m) -> SpectralField:
    """Spectral multiplier m(H): c_mu <- m(2|mu| + d) c_mu.

    ``m`` maps oscillator eigenvalues (not degrees) to complex numbers; it may
    be a callable or a mapping.  A missing eigenvalue is an error.
    """
    lookup = m.__getitem__ if isinstance(m, Mapping) else m
    factors = np.empty(field.cutoff + 1, dtype=complex)
    for k in range(field.cutoff + 1):
        lam = 2 * k + field.dim
        try:
            factors[k] = complex(lookup(lam))
        except KeyError:
            raise ValueError(f"multiplier undefined at eigenvalue {lam}") from None
    return field.with_coeffs(field.coeffs * factors[field.degrees])
