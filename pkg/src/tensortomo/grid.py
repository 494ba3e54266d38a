"""Uniform periodic grids over [-L, L)^2 and tensor fields sampled on them.

Component arrays are indexed ``[b, a]`` with ``a`` along x1 (fastest) and
``b`` along x2, so ``data[c, b, a] = f_c(-L + a h, -L + b h)``.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import tensor_core as tc

DECAY_GATE = 1e-12

KIND_COMPONENTS = {
    "scalar": ("v",),
    "vector": ("u1", "u2"),
    "sym2": ("f11", "f12", "f22"),
    "sym3": ("f111", "f112", "f122", "f222"),
    "elastic2": ("w1111", "w1112", "w1122", "w1212", "w1222", "w2222"),
    "tensor2": tuple("r" + "".join(str(i + 1) for i in idx) for idx in np.ndindex(2, 2)),
    "tensor3": tuple("r" + "".join(str(i + 1) for i in idx) for idx in np.ndindex(2, 2, 2)),
}
KIND_RANK = {"scalar": 0, "vector": 1, "sym2": 2, "sym3": 3, "elastic2": 4,
             "tensor2": 2, "tensor3": 3}
UNSYM_KIND = {2: "tensor2", 3: "tensor3"}
SYM_KIND = {0: "scalar", 1: "vector", 2: "sym2", 3: "sym3"}


class DecayGateError(ValueError):
    """The field is not small enough on the boundary ring to be periodized."""

    def __init__(self, ratio, gate=DECAY_GATE):
        super().__init__(f"boundary/peak ratio {ratio:.3e} exceeds decay gate {gate:.1e}")
        self.ratio = ratio
        self.gate = gate


@dataclass(frozen=True)
class Grid2:
    """``n`` samples per axis on [-extent, extent)."""

    n: int = 128
    extent: float = 6.0

    def __post_init__(self):
        if self.n < 16 or self.n & (self.n - 1):
            raise ValueError(f"grid size must be a power of two >= 16, got {self.n}")
        if not self.extent > 0:
            raise ValueError("extent must be positive")

    @property
    def h(self):
        return 2.0 * self.extent / self.n

    @property
    def coords(self):
        return -self.extent + self.h * np.arange(self.n)

    def mesh(self):
        """``(X1, X2)`` arrays of shape (n, n) in the ``[b, a]`` layout."""
        x = self.coords
        return np.meshgrid(x, x, indexing="xy")

    @property
    def freqs(self):
        """Angular frequencies ``(pi/L) k`` in FFT order."""
        return 2.0 * np.pi * np.fft.fftfreq(self.n, d=self.h)


@dataclass
class GridField:
    grid: Grid2
    kind: str
    data: np.ndarray = field(repr=False)

    def __post_init__(self):
        if self.kind not in KIND_COMPONENTS:
            raise ValueError(f"unknown field kind {self.kind!r}")
        data = np.asarray(self.data, dtype=float)
        shape = (len(KIND_COMPONENTS[self.kind]), self.grid.n, self.grid.n)
        if data.shape != shape:
            raise ValueError(f"{self.kind} field needs data of shape {shape}, got {data.shape}")
        if not np.all(np.isfinite(data)):
            raise ValueError("field has non-finite samples")
        self.data = data

    @property
    def components(self):
        return KIND_COMPONENTS[self.kind]

    @property
    def rank(self):
        return KIND_RANK[self.kind]

    def component(self, name):
        return self.data[self.components.index(name)]

    @classmethod
    def zeros(cls, grid, kind):
        return cls(grid, kind, np.zeros((len(KIND_COMPONENTS[kind]), grid.n, grid.n)))

    def full(self):
        """Full tensor array of shape ``(2,)*rank + (n, n)``."""
        return to_full(self.kind, self.data)

    @classmethod
    def from_full(cls, grid, kind, arr):
        return cls(grid, kind, from_full(kind, arr))

    def max_abs(self):
        return float(np.max(np.abs(self.data)))

    def l1(self):
        return float(self.grid.h ** 2 * np.sum(np.abs(self.data)))

    def boundary_ratio(self):
        """Largest sample on the outermost ring divided by the peak."""
        d = np.abs(self.data)
        peak = d.max()
        if peak == 0:
            return 0.0
        ring = max(d[:, 0, :].max(), d[:, -1, :].max(), d[:, :, 0].max(), d[:, :, -1].max())
        return float(ring / peak)

    def check_decay(self, gate=DECAY_GATE):
        ratio = self.boundary_ratio()
        if ratio >= gate:
            raise DecayGateError(ratio, gate)
        return ratio

    def inner(self, other):
        """Grid-quadrature L2 pairing with full-tensor contraction."""
        return float(self.grid.h ** 2 * np.sum(tc.full_inner(self.full(), other.full(), self.rank)))

    def _like(self, data):
        return GridField(self.grid, self.kind, data)

    def __add__(self, other):
        return self._like(self.data + other.data)

    def __sub__(self, other):
        return self._like(self.data - other.data)

    def __mul__(self, c):
        return self._like(self.data * c)

    __rmul__ = __mul__

    def __neg__(self):
        return self._like(-self.data)


def to_full(kind, data):
    rank = KIND_RANK[kind]
    if kind == "elastic2":
        return tc.elastic_from_components(data)
    if kind in ("tensor2", "tensor3"):
        return data.reshape((2,) * rank + data.shape[1:])
    if rank == 0:
        return data[0]
    return tc.sym_from_components(data, rank)


def from_full(kind, arr):
    rank = KIND_RANK[kind]
    if kind == "elastic2":
        return tc.elastic_to_components(arr)
    if kind in ("tensor2", "tensor3"):
        return np.asarray(arr).reshape((2 ** rank,) + np.shape(arr)[rank:])
    if rank == 0:
        return np.asarray(arr)[None]
    return tc.sym_to_components(arr, rank)


def mean_integral(f):
    """Per-component integral ``h^2 * sum`` (rectangle rule on the periodic grid)."""
    return f.grid.h ** 2 * f.data.sum(axis=(1, 2))


# ---------------------------------------------------------------------------
# analytic Gaussian-times-polynomial fields
# ---------------------------------------------------------------------------

class GaussPoly:
    """Sum of terms ``P(x - c) exp(-|x - c|^2 / w^2)`` with exact derivatives.

    Each term stores a 2-D coefficient array ``C`` where ``C[p, q]`` multiplies
    ``(x1 - c1)^p (x2 - c2)^q``.
    """

    def __init__(self, terms=()):
        self.terms = [(np.asarray(c, float), float(w), np.atleast_2d(np.asarray(C, float)))
                      for c, w, C in terms]

    @classmethod
    def gaussian(cls, center=(0.0, 0.0), width=1.0, amplitude=1.0, coeffs=None):
        C = np.array([[amplitude]]) if coeffs is None else amplitude * np.atleast_2d(coeffs)
        return cls([(center, width, C)])

    @classmethod
    def monomial(cls, p, q, center=(0.0, 0.0), width=1.0, amplitude=1.0):
        C = np.zeros((p + 1, q + 1))
        C[p, q] = amplitude
        return cls([(center, width, C)])

    @classmethod
    def zero(cls):
        return cls()

    def __add__(self, other):
        return GaussPoly(self.terms + other.terms)

    def __sub__(self, other):
        return self + (-1.0) * other

    def __mul__(self, s):
        return GaussPoly([(c, w, s * C) for c, w, C in self.terms])

    __rmul__ = __mul__

    def __neg__(self):
        return -1.0 * self

    def d(self, axis):
        """Exact partial derivative along x1 (axis 0) or x2 (axis 1)."""
        out = []
        for c, w, C in self.terms:
            p, q = C.shape
            shape = (p + 1, q) if axis == 0 else (p, q + 1)
            D = np.zeros(shape)
            if axis == 0:
                D[:p - 1, :] += C[1:, :] * np.arange(1, p)[:, None]
                D[1:, :] += -2.0 / w ** 2 * C
            else:
                D[:, :q - 1] += C[:, 1:] * np.arange(1, q)[None, :]
                D[:, 1:] += -2.0 / w ** 2 * C
            out.append((c, w, D))
        return GaussPoly(out)

    def dd(self, i, j):
        return self.d(i).d(j)

    def __call__(self, x1, x2):
        x1 = np.asarray(x1, float)
        x2 = np.asarray(x2, float)
        total = np.zeros(np.broadcast_shapes(x1.shape, x2.shape))
        for c, w, C in self.terms:
            y1, y2 = x1 - c[0], x2 - c[1]
            # Horner in both variables
            poly = np.zeros_like(total)
            for p in range(C.shape[0] - 1, -1, -1):
                row = np.zeros_like(total)
                for q in range(C.shape[1] - 1, -1, -1):
                    row = row * y2 + C[p, q]
                poly = poly * y1 + row
            total = total + poly * np.exp(-(y1 ** 2 + y2 ** 2) / w ** 2)
        return total

    def on(self, grid):
        X1, X2 = grid.mesh()
        return self(X1, X2)


def _as_gp(v):
    return GaussPoly.zero() if v is None else v


def _gated(f, gate):
    if gate is not None:
        f.check_decay(gate)
    return f


def gen_gaussian(grid, kind, center=(0.0, 0.0), width=1.0, weights=None, poly=None,
                 mean_subtract=False, gate=DECAY_GATE):
    """Gaussian-enveloped field ``c_k p_k(x - center) exp(-|x - center|^2 / width^2)``.

    ``poly`` maps a component index to a coefficient array for ``p_k``
    (default ``p_k = 1``).  Raises :class:`DecayGateError` when the boundary
    ring is not below ``gate`` times the peak.
    """
    if width <= 0:
        raise ValueError("width must be positive")
    ncomp = len(KIND_COMPONENTS[kind])
    weights = np.ones(ncomp) if weights is None else np.asarray(weights, float)
    if weights.shape != (ncomp,):
        raise ValueError(f"{kind} needs {ncomp} weights")
    poly = poly or {}
    data = np.zeros((ncomp, grid.n, grid.n))
    for k in range(ncomp):
        if weights[k] == 0:
            continue
        gp = GaussPoly.gaussian(center, width, weights[k], poly.get(k))
        data[k] = gp.on(grid)
    f = _gated(GridField(grid, kind, data), gate)
    if mean_subtract:
        f = GridField(grid, kind, data - data.mean(axis=(1, 2), keepdims=True))
    return f


def gen_scalar(grid, v, gate=DECAY_GATE):
    return _gated(GridField(grid, "scalar", v.on(grid)[None]), gate)


def gen_vector(grid, u, gate=DECAY_GATE):
    return _gated(GridField(grid, "vector", np.stack([_as_gp(c).on(grid) for c in u])), gate)


def gen_sym2(grid, v, gate=DECAY_GATE):
    """Sym-2 field from three analytic components ``(v11, v12, v22)``."""
    return _gated(GridField(grid, "sym2", np.stack([_as_gp(c).on(grid) for c in v])), gate)


def gen_hessian_field(grid, v, gate=DECAY_GATE):
    """Exact nodal values of ``d^2 v`` for an analytic scalar ``v``."""
    data = np.stack([v.dd(0, 0).on(grid), v.dd(0, 1).on(grid), v.dd(1, 1).on(grid)])
    return _gated(GridField(grid, "sym2", data), gate)


def gen_airy_field(grid, psi, gate=DECAY_GATE):
    """Sym-2 field with ``delta^2 g = 0`` built from a stress function ``psi``.

    ``g11 = d22 psi``, ``g12 = -d12 psi``, ``g22 = d11 psi``.
    """
    data = np.stack([psi.dd(1, 1).on(grid), -psi.dd(0, 1).on(grid), psi.dd(0, 0).on(grid)])
    return _gated(GridField(grid, "sym2", data), gate)


def _analytic_hk_full(grid, v, u):
    """Full 2x2x2x2 nodal array of ``Hv + Ku`` from analytic components."""
    n = grid.n
    out = np.zeros((2, 2, 2, 2, n, n))
    if v is not None:
        vc = {(0, 0): _as_gp(v[0]), (0, 1): _as_gp(v[1]), (1, 0): _as_gp(v[1]), (1, 1): _as_gp(v[2])}
        # (Hv)_ijkl = 1/2 (d_i d_j v_kl + d_k d_l v_ij)
        cache = {}
        for i, j, k, l in np.ndindex(2, 2, 2, 2):
            key = (tuple(sorted((i, j))), (k, l))
            if key not in cache:
                cache[key] = vc[(k, l)].dd(i, j).on(grid)
            key2 = (tuple(sorted((k, l))), (i, j))
            if key2 not in cache:
                cache[key2] = vc[(i, j)].dd(k, l).on(grid)
            out[i, j, k, l] += 0.5 * (cache[key] + cache[key2])
    if u is not None:
        uc = [_as_gp(u[0]), _as_gp(u[1])]
        grad = {(i, j): uc[j].d(i).on(grid) for i, j in np.ndindex(2, 2)}  # d_i u_j
        eye = np.eye(2)
        for i, j, k, l in np.ndindex(2, 2, 2, 2):
            out[i, j, k, l] += 0.25 * (grad[i, j] + grad[j, i]) * eye[k, l]
            out[i, j, k, l] += 0.25 * (grad[k, l] + grad[l, k]) * eye[i, j]
    return out


def gen_elastic_potential(grid, v=None, u=None, gate=DECAY_GATE):
    """Exact nodal values of ``Hv + Ku``.

    ``v`` is a triple of analytic components ``(v11, v12, v22)`` and ``u`` a
    pair ``(u1, u2)``; either may be ``None``.
    """
    full = _analytic_hk_full(grid, v, u)
    return _gated(GridField(grid, "elastic2", tc.elastic_to_components(full)), gate)


def gen_random_bandlimited(grid, kind, seed, cutoff=0.25, mean_zero=True):
    """Seeded real field whose spectrum lives on ``|y| <= cutoff * y_max``.

    ``y_max = pi / h`` is the Nyquist frequency.  Each component is scaled to
    unit peak magnitude.
    """
    if not 0 < cutoff <= 0.5:
        raise ValueError("cutoff must be in (0, 1/2]")
    rng = np.random.default_rng(seed)
    ncomp = len(KIND_COMPONENTS[kind])
    y = grid.freqs
    Y1, Y2 = np.meshgrid(y, y, indexing="xy")
    mask = np.hypot(Y1, Y2) <= cutoff * np.pi / grid.h
    if mean_zero:
        mask[0, 0] = False
    data = np.empty((ncomp, grid.n, grid.n))
    for c in range(ncomp):
        spec = rng.standard_normal((grid.n, grid.n)) + 1j * rng.standard_normal((grid.n, grid.n))
        comp = np.fft.ifft2(spec * mask).real
        peak = np.abs(comp).max()
        data[c] = comp / peak if peak > 0 else comp
    return GridField(grid, kind, data)


def random_gausspoly(rng, degree=2, width=1.0, center_spread=0.5):
    """Random analytic term used for decaying property-test inputs."""
    C = np.zeros((degree + 1, degree + 1))
    for p in range(degree + 1):
        for q in range(degree + 1 - p):
            C[p, q] = rng.standard_normal()
    center = rng.uniform(-center_spread, center_spread, size=2)
    return GaussPoly([(center, width, C)])


def gen_random_decaying(grid, kind, seed, degree=2, width=1.0):
    """Seeded Gaussian-times-random-polynomial field (decays at the boundary)."""
    rng = np.random.default_rng(seed)
    ncomp = len(KIND_COMPONENTS[kind])
    data = np.stack([random_gausspoly(rng, degree, width).on(grid) for _ in range(ncomp)])
    return GridField(grid, kind, data)
