"""Pointwise algebra of symmetric and elastic tensors.

Two representations are used throughout the package:

* *full* arrays, where a rank-``r`` tensor in R^n has shape ``(n,)*r + batch``.
  Index axes always come first so the same routines act on a single tensor
  or on a whole grid of them (spatial or frequency samples).
* *canonical* storage (:class:`SymTensor`, :class:`ElasticTensor2`), one value
  per non-decreasing multi-index, used for exact pointwise work and file I/O.

The inner product on both is the full-array contraction, so canonical
components carry their multiplicity when two tensors are paired.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

MAX_SYM_ORDER = 3
RAY_TOL = 1e-12


class TensorOrderError(ValueError):
    """Raised when an operation would leave the supported tensor orders."""


# ---------------------------------------------------------------------------
# full-array routines (index axes first, arbitrary trailing batch axes)
# ---------------------------------------------------------------------------

def _perm_average(t, axes):
    """Average ``t`` over all permutations of the listed index axes."""
    axes = list(axes)
    if len(axes) < 2:
        return np.array(t, copy=True)
    ndim = np.ndim(t)
    acc = None
    count = 0
    for perm in itertools.permutations(axes):
        order = list(range(ndim))
        for src, dst in zip(axes, perm):
            order[src] = dst
        term = np.transpose(t, order)
        acc = term.copy() if acc is None else acc + term
        count += 1
    return acc / count


def sym_full(t, m):
    """Symmetrize the first ``m`` index axes of a full array."""
    if m > MAX_SYM_ORDER + 1:
        raise TensorOrderError(f"symmetrization of order {m} is not supported")
    return _perm_average(np.asarray(t), range(m))


def eps_full(t):
    """Project a full 4-index array onto the elastic tensors E^2.

    Symmetrizes in (i, j) and in (k, l), then averages with the pair-swapped
    tensor.  Extra trailing axes are treated as batch axes.
    """
    t = np.asarray(t)
    t = 0.5 * (t + np.swapaxes(t, 0, 1))
    t = 0.5 * (t + np.swapaxes(t, 2, 3))
    swapped = np.moveaxis(t, (0, 1, 2, 3), (2, 3, 0, 1))
    return 0.5 * (t + swapped)


def i_x_full(x, t, m):
    """Symmetric product of a vector (field) ``x`` with an order-``m`` tensor."""
    if m + 1 > MAX_SYM_ORDER:
        raise TensorOrderError(f"i_x would produce order {m + 1} > {MAX_SYM_ORDER}")
    x = np.asarray(x)
    t = np.asarray(t)
    # new index goes last: p[i1..im, k] = t[i1..im] * x[k]
    prod = t[(slice(None),) * m + (None,)] * x[(None,) * m]
    return sym_full(prod, m + 1)


def j_x_full(x, t, m):
    """Contract the last index of an order-``m`` tensor with ``x``."""
    if m < 1:
        raise TensorOrderError("j_x needs a tensor of order >= 1")
    x = np.asarray(x)
    t = np.asarray(t)
    x = x[(None,) * (m - 1)]
    return np.sum(t * x, axis=m - 1)


def full_inner(a, b, rank):
    """Full contraction over the first ``rank`` axes (complex-bilinear)."""
    a = np.asarray(a)
    b = np.asarray(b)
    axes = tuple(range(rank))
    return np.sum(a * b, axis=axes)


# ---------------------------------------------------------------------------
# canonical storage
# ---------------------------------------------------------------------------

def canonical_indices(m, n=2):
    """Non-decreasing multi-indices of length ``m`` over ``range(n)``."""
    return list(itertools.combinations_with_replacement(range(n), m))


def multiplicity(idx):
    """Number of distinct permutations of a multi-index."""
    counts = {}
    for i in idx:
        counts[i] = counts.get(i, 0) + 1
    out = math.factorial(len(idx))
    for c in counts.values():
        out //= math.factorial(c)
    return out


def pair_indices(n=2):
    return canonical_indices(2, n)


def elastic_indices(n=2):
    """Canonical ``((i, j), (k, l))`` pairs with ``(ij) <= (kl)``."""
    pairs = pair_indices(n)
    return [(pairs[a], pairs[b]) for a in range(len(pairs)) for b in range(a, len(pairs))]


def sym_from_components(comps, m, n=2):
    """Expand canonical components (first axis) into a full array."""
    comps = np.asarray(comps)
    batch = comps.shape[1:]
    out = np.zeros((n,) * m + batch, dtype=comps.dtype)
    for c, idx in enumerate(canonical_indices(m, n)):
        for perm in set(itertools.permutations(idx)):
            out[perm] = comps[c]
    return out


def sym_to_components(full, m, n=2):
    full = np.asarray(full)
    return np.stack([full[idx] for idx in canonical_indices(m, n)])


def elastic_from_components(comps, n=2):
    comps = np.asarray(comps)
    batch = comps.shape[1:]
    out = np.zeros((n,) * 4 + batch, dtype=comps.dtype)
    for c, (p, q) in enumerate(elastic_indices(n)):
        for a in set(itertools.permutations(p)):
            for b in set(itertools.permutations(q)):
                out[a + b] = comps[c]
                out[b + a] = comps[c]
    return out


def elastic_to_components(full, n=2):
    full = np.asarray(full)
    return np.stack([full[p + q] for p, q in elastic_indices(n)])


@dataclass(frozen=True)
class SymTensor:
    """Symmetric tensor of order ``m`` in R^n stored by canonical multi-index."""

    m: int
    n: int
    components: np.ndarray = field(repr=False)

    def __post_init__(self):
        if not 0 <= self.m <= MAX_SYM_ORDER:
            raise TensorOrderError(f"order {self.m} outside 0..{MAX_SYM_ORDER}")
        comps = np.asarray(self.components)
        expected = math.comb(self.n + self.m - 1, self.m)
        if comps.shape != (expected,):
            raise ValueError(f"expected {expected} components, got shape {comps.shape}")
        object.__setattr__(self, "components", comps)

    @classmethod
    def from_full(cls, t, check=True, atol=1e-12):
        t = np.asarray(t)
        m, n = t.ndim, (t.shape[0] if t.ndim else 2)
        if check and m > 1 and not np.allclose(sym_full(t, m), t, atol=atol, rtol=0):
            raise ValueError("array is not symmetric; use sigma_project")
        return cls(m, n, sym_to_components(t, m, n) if m else t.reshape(1))

    @classmethod
    def zeros(cls, m, n=2):
        return cls(m, n, np.zeros(math.comb(n + m - 1, m)))

    def full(self):
        if self.m == 0:
            return self.components[0].copy()
        return sym_from_components(self.components, self.m, self.n)

    def __getitem__(self, idx):
        return self.components[canonical_indices(self.m, self.n).index(tuple(sorted(idx)))]

    def inner(self, other):
        return full_inner(self.full(), other.full(), self.m)

    def __add__(self, other):
        return SymTensor(self.m, self.n, self.components + other.components)

    def __sub__(self, other):
        return SymTensor(self.m, self.n, self.components - other.components)

    def __mul__(self, c):
        return SymTensor(self.m, self.n, self.components * c)

    __rmul__ = __mul__


@dataclass(frozen=True)
class ElasticTensor2:
    """Elastic 2-tensor: rank 4 with (ij), (kl) and pair-swap symmetry."""

    n: int
    components: np.ndarray = field(repr=False)

    def __post_init__(self):
        comps = np.asarray(self.components)
        p = math.comb(self.n + 1, 2)
        if comps.shape != (p * (p + 1) // 2,):
            raise ValueError(f"expected {p * (p + 1) // 2} components, got {comps.shape}")
        object.__setattr__(self, "components", comps)

    @classmethod
    def from_full(cls, t, check=True, atol=1e-12):
        t = np.asarray(t)
        if t.ndim != 4:
            raise ValueError("elastic tensors need a 4-index array")
        if check and not np.allclose(eps_full(t), t, atol=atol, rtol=0):
            raise ValueError("array lacks elastic symmetry; use eps_project")
        return cls(t.shape[0], elastic_to_components(t, t.shape[0]))

    def full(self):
        return elastic_from_components(self.components, self.n)

    def pair_matrix(self):
        """Symmetric matrix over pair indices (11, 12, 22, ...)."""
        pairs = pair_indices(self.n)
        t = self.full()
        return np.array([[t[p + q] for q in pairs] for p in pairs])

    def inner(self, other):
        return full_inner(self.full(), other.full(), 4)


@dataclass(frozen=True)
class PolarizedRay:
    """A base point, a unit direction ``xi`` and a unit polarization ``zeta``.

    ``zeta`` is normalized at construction and must be parallel or
    perpendicular to ``xi``.
    """

    x: np.ndarray
    xi: np.ndarray
    zeta: np.ndarray

    def __post_init__(self):
        xi = np.asarray(self.xi, dtype=float)
        zeta = np.asarray(self.zeta, dtype=float)
        if abs(np.linalg.norm(xi) - 1.0) > RAY_TOL:
            raise ValueError("direction must be a unit vector")
        nz = np.linalg.norm(zeta)
        if nz == 0:
            raise ValueError("polarization must be nonzero")
        zeta = zeta / nz
        dot = abs(float(xi @ zeta))
        if dot > RAY_TOL and abs(dot - 1.0) > RAY_TOL:
            raise ValueError("polarization must be parallel or perpendicular to the direction")
        object.__setattr__(self, "x", np.asarray(self.x, dtype=float))
        object.__setattr__(self, "xi", xi)
        object.__setattr__(self, "zeta", zeta)


# ---------------------------------------------------------------------------
# public operations
# ---------------------------------------------------------------------------

def sigma_project(t):
    """Full symmetrization of a raw m-tensor given as an ``(n,)*m`` array."""
    t = np.asarray(t)
    if t.ndim > MAX_SYM_ORDER:
        raise TensorOrderError(f"order {t.ndim} > {MAX_SYM_ORDER} is unsupported")
    return SymTensor.from_full(sym_full(t, t.ndim), check=False)


def eps_project(t):
    """Project a raw 4-index array onto E^2."""
    t = np.asarray(t)
    if t.ndim != 4 or len(set(t.shape)) != 1:
        raise ValueError(f"expected an (n, n, n, n) array, got {t.shape}")
    return ElasticTensor2.from_full(eps_full(t), check=False)


def _as_sym(f):
    if isinstance(f, SymTensor):
        return f
    f = np.asarray(f)
    if f.ndim == 0:
        return SymTensor(0, 2, f.reshape(1))
    return SymTensor.from_full(f)


def i_x(x, f):
    f = _as_sym(f)
    x = np.asarray(x, dtype=float)
    if f.m + 1 > MAX_SYM_ORDER:
        raise TensorOrderError(f"i_x of an order-{f.m} tensor exceeds order {MAX_SYM_ORDER}")
    if f.m == 0:
        return SymTensor.from_full(x * f.components[0], check=False)
    return SymTensor.from_full(i_x_full(x, f.full(), f.m), check=False)


def i_x_pow(x, f, k):
    f = _as_sym(f)
    if f.m + k > MAX_SYM_ORDER:
        raise TensorOrderError(f"i_x^{k} of an order-{f.m} tensor exceeds order {MAX_SYM_ORDER}")
    for _ in range(k):
        f = i_x(x, f)
    return f


def j_x(x, f):
    f = _as_sym(f)
    if f.m < 1:
        raise TensorOrderError("cannot contract a scalar")
    out = j_x_full(np.asarray(x, dtype=float), f.full(), f.m)
    if f.m == 1:
        return SymTensor(0, f.n, np.reshape(out, 1))
    return SymTensor.from_full(out, check=False)


def j_x_pow(x, f, k):
    f = _as_sym(f)
    if k < 1 or f.m < k:
        raise TensorOrderError(f"j_x^{k} needs order >= {k}, got {f.m}")
    for _ in range(k):
        f = j_x(x, f)
    return f


def ray_weights(xi, zeta, m):
    """Full array ``(xi ⊗ zeta)^{⊗m}``, the integrand pairing of the elastic transform."""
    xi = np.asarray(xi, dtype=float)
    zeta = np.asarray(zeta, dtype=float)
    a = np.multiply.outer(xi, zeta)
    return a if m == 1 else np.multiply.outer(a, a)


def contract_ray(f, ray):
    """``<f, (xi ⊗ zeta)^{⊗m}>`` for a sym-2 (m=1) or elastic-2 (m=2) tensor."""
    if isinstance(f, ElasticTensor2):
        return float(full_inner(f.full(), ray_weights(ray.xi, ray.zeta, 2), 4))
    f = _as_sym(f)
    if f.m != 2:
        raise TensorOrderError("contract_ray needs a symmetric 2-tensor or an elastic 2-tensor")
    return float(full_inner(f.full(), ray_weights(ray.xi, ray.zeta, 1), 2))
