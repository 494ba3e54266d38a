"""Line-integral transforms of tensor fields on the grid.

Fields are sampled off-grid through a periodic B-spline interpolant
(quintic by default) and integrated with the composite trapezoid rule at a
spatial step ``tau`` (default ``h/2``) over ``|t| <= L sqrt(2)``.

Lines are parametrized as ``x = s xi_perp + t xi`` with
``xi = (cos phi, sin phi)`` and ``xi_perp = (-sin phi, cos phi)``.
"""
from __future__ import annotations

import csv
import os
from dataclasses import dataclass, field

import numpy as np

from . import tensor_core as tc
from .grid import KIND_COMPONENTS, KIND_RANK, GridField, from_full, to_full
from ._lineint_py import _taps
from .spectral import dtft

if os.environ.get("TENSORTOMO_PURE_PYTHON") == "1":
    from ._lineint_py import line_integrals as _kernel
    KERNEL_BACKEND = "python"
else:
    try:
        from ._lineint import line_integrals as _kernel
        KERNEL_BACKEND = "cython"
    except ImportError:  # extension not built
        from ._lineint_py import line_integrals as _kernel
        KERNEL_BACKEND = "python"

DEFAULT_ORDER = 5
CUTOFF_REL = 1e-14
CHANNELS = ("i0", "i1", "i2", "x1_long", "x1_perp", "x2_long", "x2_perp", "mixed")


def _bspline_symbol(n, order):
    theta = 2 * np.pi * np.fft.fftfreq(n)
    if order == 3:
        return (4 + 2 * np.cos(theta)) / 6
    if order == 5:
        return (66 + 52 * np.cos(theta) + 2 * np.cos(2 * theta)) / 120
    raise ValueError(f"unsupported spline order {order}")


@dataclass
class SplineField:
    """Periodic B-spline interpolant of every component of a grid field."""

    field: GridField
    order: int = DEFAULT_ORDER
    coef: np.ndarray = field(init=False, repr=False)
    cutoff: float = field(init=False)

    def __post_init__(self):
        n = self.field.grid.n
        b = _bspline_symbol(n, self.order)
        spec = np.fft.fft2(self.field.data, axes=(1, 2)) / np.outer(b, b)
        self.coef = np.ascontiguousarray(np.fft.ifft2(spec, axes=(1, 2)).real)
        self.cutoff = CUTOFF_REL * self.field.max_abs()

    @property
    def grid(self):
        return self.field.grid

    def __call__(self, points):
        """Interpolated components at ``points`` of shape (M, 2) -> (C, M).

        Points outside ``[-L, L)^2`` evaluate to zero, as in the line kernel.
        """
        points = np.atleast_2d(np.asarray(points, float))
        g = self.grid
        inside = np.all((points >= -g.extent) & (points < g.extent), axis=1)
        ja, wa = _taps((points[:, 0] + g.extent) / g.h, self.order)
        jb, wb = _taps((points[:, 1] + g.extent) / g.h, self.order)
        ja %= g.n
        jb %= g.n
        vals = np.einsum("cmkl,mk,ml->cm", self.coef[:, jb[:, :, None], ja[:, None, :]], wb, wa)
        return np.where(inside, vals, 0.0)


def interpolant(f, order=DEFAULT_ORDER):
    if isinstance(f, SplineField):
        return f
    return SplineField(f, order)


def component_weights(kind, W):
    """Turn full contraction arrays ``W`` (rank + batch) into per-component weights.

    ``<f, W> = sum_c f_c * weights[c]``; returned with components last.
    """
    W = np.asarray(W, float)
    rank = KIND_RANK[kind]
    ncomp = len(KIND_COMPONENTS[kind])
    batch = W.shape[rank:]
    out = np.empty(batch + (ncomp,))
    for c in range(ncomp):
        e = np.zeros((ncomp,) + (1,) * len(batch))
        e[c] = 1.0
        basis = to_full(kind, e)
        out[..., c] = tc.full_inner(basis, W, rank)
    return out


def integrate(sf, base, dirs, weights, q=0, tau=None, tmax=None):
    """Quadrature of ``int t^q <f(base + t dir), W> dt`` for a batch of lines.

    ``tau`` and ``tmax`` are spatial; they are converted to parameter units
    per line so non-unit directions sample the same spatial step.
    """
    g = sf.grid
    base = np.atleast_2d(np.asarray(base, float))
    dirs = np.atleast_2d(np.asarray(dirs, float))
    tau = g.h / 2 if tau is None else tau
    tmax = g.extent * np.sqrt(2) if tmax is None else tmax
    speed = np.linalg.norm(dirs, axis=1)
    if np.any(speed == 0):
        raise ValueError("line direction must be nonzero")
    # samples must cover the whole box even when base is off-center
    along = np.abs(np.einsum("pi,pi->p", base, dirs)) / speed
    tmax_p = (tmax + along) / speed
    tau_p = tau / speed
    nsteps = np.floor(tmax_p / tau_p + 1e-9).astype(np.int64)
    return _kernel(sf.coef, g.extent, g.h, base, dirs, np.asarray(weights, float), int(q),
                   tau_p, nsteps, sf.order, sf.cutoff)


# ---------------------------------------------------------------------------
# line grids and sinograms
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LineGrid:
    n_angles: int
    n_offsets: int
    extent: float
    tau: float
    tmax: float

    @classmethod
    def for_grid(cls, grid, n_angles=64, n_offsets=129, tau=None):
        tau = grid.h / 2 if tau is None else tau
        if tau > grid.h / 2 + 1e-15:
            raise ValueError("quadrature step must not exceed h/2")
        return cls(n_angles, n_offsets, grid.extent, tau, grid.extent * np.sqrt(2))

    @property
    def angles(self):
        return np.arange(self.n_angles) * np.pi / self.n_angles

    @property
    def offsets(self):
        return np.linspace(-self.extent, self.extent, self.n_offsets)

    def rays(self):
        """``(base, xi, xi_perp)`` arrays of shape (A*B, 2), angle-major."""
        phi = np.repeat(self.angles, self.n_offsets)
        s = np.tile(self.offsets, self.n_angles)
        xi = np.stack([np.cos(phi), np.sin(phi)], axis=1)
        xp = np.stack([-np.sin(phi), np.cos(phi)], axis=1)
        return s[:, None] * xp, xi, xp


@dataclass
class Sinogram:
    lines: LineGrid
    channels: dict = field(default_factory=dict)
    meta: dict = field(default_factory=dict)

    def __getitem__(self, name):
        return self.channels[name]

    def max_abs(self, names=None):
        names = self.channels if names is None else names
        return max(float(np.abs(self.channels[c]).max()) for c in names)

    def merge(self, other):
        if other.lines != self.lines:
            raise ValueError("sinograms live on different line grids")
        return Sinogram(self.lines, {**self.channels, **other.channels}, {**self.meta, **other.meta})

    def to_csv(self, path):
        phis = self.lines.angles
        offs = self.lines.offsets
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["phi", "s", "channel", "value"])
            for name, arr in self.channels.items():
                for a, phi in enumerate(phis):
                    for b, s in enumerate(offs):
                        w.writerow([f"{phi:.17g}", f"{s:.17g}", name, f"{arr[a, b]:.17g}"])

    @classmethod
    def read_csv(cls, path, lines):
        chans = {}
        phis = lines.angles
        offs = lines.offsets
        with open(path, newline="") as fh:
            rows = csv.DictReader(fh)
            for row in rows:
                arr = chans.setdefault(row["channel"], np.zeros((lines.n_angles, lines.n_offsets)))
                a = int(np.argmin(np.abs(phis - float(row["phi"]))))
                b = int(np.argmin(np.abs(offs - float(row["s"]))))
                arr[a, b] = float(row["value"])
        return cls(lines, chans)


def _sinogram(f, lines, W, q, name, order, note):
    sf = interpolant(f, order)
    base, xi, _ = lines.rays()
    weights = component_weights(f.kind if isinstance(f, GridField) else sf.field.kind, W)
    vals = integrate(sf, base, xi, weights, q, lines.tau, lines.tmax)
    return Sinogram(lines, {name: vals.reshape(lines.n_angles, lines.n_offsets)}, {name: note})


def _contraction(xi, zeta, m):
    """``(xi ⊗ zeta)^{⊗m}`` for batches of vectors, index axes first."""
    xi = np.asarray(xi).T
    zeta = np.asarray(zeta).T
    a = xi[:, None] * zeta[None, :]
    if m == 1:
        return a
    return a[:, :, None, None] * a[None, None]


def _field(f):
    return f.field if isinstance(f, SplineField) else f


def _gate(f):
    _field(f).check_decay()


def momentum_I(f, q, lines, order=DEFAULT_ORDER):
    """``I^q f(s, phi) = int t^q f_ij(s xi_perp + t xi) xi^i xi^j dt``."""
    if q not in (0, 1, 2):
        raise ValueError("moment order q must be 0, 1 or 2")
    if _field(f).kind != "sym2":
        raise ValueError("momentum transforms act on sym2 fields")
    _gate(f)
    _, xi, _ = lines.rays()
    return _sinogram(f, lines, _contraction(xi, xi, 1), q, f"i{q}", order,
                     f"t^{q}-weighted longitudinal transform, unit xi")


def elastic_X(f, m, lines, order=DEFAULT_ORDER):
    """Elastic ray transform with the two channels ``zeta = xi`` and ``zeta = xi_perp``."""
    kind = _field(f).kind
    if (m, kind) not in ((1, "sym2"), (2, "elastic2")):
        raise ValueError(f"X^{m} needs a {'sym2' if m == 1 else 'elastic2'} field, got {kind}")
    _gate(f)
    sf = interpolant(f, order)
    _, xi, xp = lines.rays()
    long = _sinogram(sf, lines, _contraction(xi, xi, m), 0, f"x{m}_long", order, "zeta = xi")
    perp = _sinogram(sf, lines, _contraction(xi, xp, m), 0, f"x{m}_perp", order, "zeta = xi_perp")
    return long.merge(perp)


def mixed_M(f, lines, order=DEFAULT_ORDER):
    """``M f = int f_ij xi_i zeta_j dt`` with ``zeta = xi_perp``."""
    if _field(f).kind != "sym2":
        raise ValueError("the mixed transform acts on sym2 fields")
    _gate(f)
    _, xi, xp = lines.rays()
    return _sinogram(f, lines, _contraction(xi, xp, 1), 0, "mixed", order, "zeta = xi_perp")


# ---------------------------------------------------------------------------
# transforms at arbitrary (x, xi)
# ---------------------------------------------------------------------------

def _sym2_weights(xi, eta):
    return component_weights("sym2", _contraction(np.atleast_2d(xi), np.atleast_2d(eta), 1))


def momentum_J_direct(f, q, x, xi, order=DEFAULT_ORDER):
    """Direct quadrature of ``int t^q f_ij(x + t xi) xi^i xi^j dt`` for any nonzero ``xi``.

    ``x`` and ``xi`` may be single vectors or (P, 2) batches.
    """
    x = np.atleast_2d(np.asarray(x, float))
    xi = np.atleast_2d(np.asarray(xi, float))
    if np.any(np.linalg.norm(xi, axis=1) == 0):
        raise ValueError("xi must be nonzero")
    sf = interpolant(f, order)
    out = integrate(sf, x, xi, _sym2_weights(xi, xi), q)
    return out if out.size > 1 else float(out[0])


def momentum_I_at(f, q, x, xi, order=DEFAULT_ORDER):
    """``I^q f(x, xi)`` for unit ``xi`` with ``t`` measured from ``x``."""
    return momentum_J_direct(f, q, x, xi, order)


def project_base(x, xi):
    """``x - <x, xi>/|xi|^2 xi`` and ``xi/|xi|`` (batched)."""
    x = np.atleast_2d(np.asarray(x, float))
    xi = np.atleast_2d(np.asarray(xi, float))
    n2 = np.einsum("pi,pi->p", xi, xi)
    c = np.einsum("pi,pi->p", x, xi) / n2
    return x - c[:, None] * xi, xi / np.sqrt(n2)[:, None]


def J_from_I(I0, I1, I2, x, xi):
    """Convert ``I^q`` values taken at the projected base point into ``J^q(x, xi)``."""
    x = np.asarray(x, float)
    xi = np.asarray(xi, float)
    nx = np.sqrt(np.sum(xi * xi, axis=-1))
    if np.any(nx == 0):
        raise ValueError("xi must be nonzero")
    c = np.sum(xi * x, axis=-1)
    J0 = nx * I0
    J1 = -c / nx * I0 + I1
    J2 = c ** 2 / nx ** 3 * I0 - 2 * c / nx ** 2 * I1 + I2 / nx
    return J0, J1, J2


def momentum_J_via_I(f, x, xi, order=DEFAULT_ORDER):
    """``(J0, J1, J2)`` at ``(x, xi)`` computed from ``I^0, I^1, I^2`` at the projected point."""
    sf = interpolant(f, order)
    base, unit = project_base(x, xi)
    I = [momentum_I_at(sf, q, base, unit) for q in range(3)]
    return J_from_I(*I, np.atleast_2d(x), np.atleast_2d(xi))


def vector_transform(f, x, xi, order=DEFAULT_ORDER):
    """``V_j(x, xi) = int f_ij(x + t xi) xi_i dt`` for j = 1, 2 -> shape (P, 2)."""
    sf = interpolant(f, order)
    x = np.atleast_2d(np.asarray(x, float))
    xi = np.atleast_2d(np.asarray(xi, float))
    out = []
    for j in range(2):
        e = np.zeros_like(xi)
        e[:, j] = 1.0
        out.append(integrate(sf, x, xi, _sym2_weights(xi, e), 0))
    return np.stack(out, axis=1)


def mixed_at(f, x, xi, eta, order=DEFAULT_ORDER):
    """``M f(x, xi, eta) = int f_ij xi_i (P_xi eta)_j dt`` with ``P_xi eta = eta - <xi,eta>/|xi|^2 xi``."""
    sf = interpolant(f, order)
    x = np.atleast_2d(np.asarray(x, float))
    xi = np.atleast_2d(np.asarray(xi, float))
    eta = np.atleast_2d(np.asarray(eta, float))
    n2 = np.einsum("pi,pi->p", xi, xi)
    zeta = eta - (np.einsum("pi,pi->p", xi, eta) / n2)[:, None] * xi
    return integrate(sf, x, xi, _sym2_weights(xi, zeta), 0)


# ---------------------------------------------------------------------------
# identity checks
# ---------------------------------------------------------------------------

@dataclass
class SliceResult:
    phi: float
    sigma: np.ndarray
    lhs: np.ndarray
    rhs: np.ndarray
    scale: float

    @property
    def rel_error(self):
        """Max deviation relative to ``(2 pi)^{1/2} max_sigma |f^(sigma xi_perp)|``.

        Normalizing by the full tensor keeps the measure meaningful on angles
        where the projection itself vanishes.
        """
        if self.scale == 0:
            return float(np.abs(self.lhs - self.rhs).max())
        return float(np.abs(self.lhs - self.rhs).max() / self.scale)


def fourier_slice_check(f, phi, sigma_max=8.0, order=DEFAULT_ORDER):
    """Compare the 1-D transform over ``s`` of ``I^0 f(s xi_perp, xi)`` with
    ``(2 pi)^{1/2} f^_ij(sigma xi_perp) xi^i xi^j``.

    Offsets are taken on the periodic lattice ``s_b = -L + b h`` so the 1-D
    frequencies are ``sigma = (pi/L) k``.
    """
    g = f.grid
    sf = interpolant(f, order)
    xi = np.array([np.cos(phi), np.sin(phi)])
    xp = np.array([-np.sin(phi), np.cos(phi)])
    s = g.coords
    base = s[:, None] * xp[None, :]
    dirs = np.broadcast_to(xi, base.shape)
    proj = integrate(sf, base, dirs, _sym2_weights(dirs, dirs), 0)
    sig = g.freqs
    lhs = np.fft.fft(proj) * (-1.0) ** np.arange(g.n) * g.h / np.sqrt(2 * np.pi)
    keep = np.abs(sig) <= sigma_max
    sig, lhs = sig[keep], lhs[keep]
    Y = sig[None, :] * xp[:, None]
    F = dtft(f, Y)  # (3, M)
    w = component_weights("sym2", np.multiply.outer(xi, xi))
    rhs = np.sqrt(2 * np.pi) * np.einsum("c,cm->m", w, F)
    scale = np.sqrt(2 * np.pi) * np.sqrt(np.sum(np.abs(to_full("sym2", F)) ** 2, axis=(0, 1))).max()
    order_idx = np.argsort(sig)
    return SliceResult(float(phi), sig[order_idx], lhs[order_idx], rhs[order_idx], float(scale))


@dataclass
class MomentRelationResult:
    relation_residual: float
    recovery_residual: float
    richardson_gap: float
    scale: float
    n_probes: int


def random_probes(n, seed, radius=2.0):
    """Unit directions and base points perpendicular to them."""
    rng = np.random.default_rng(seed)
    phi = rng.uniform(0, 2 * np.pi, n)
    xi = np.stack([np.cos(phi), np.sin(phi)], axis=1)
    s = rng.uniform(-radius, radius, n)
    x = s[:, None] * np.stack([-xi[:, 1], xi[:, 0]], axis=1)
    return x, xi


def _fd_relation_terms(sf, x, xi, step):
    """Central differences of J^0 in xi and of J^1 in x, plus the mixed-transform pieces."""
    P = x.shape[0]
    bases, dirs, tags = [], [], []
    for j in range(2):
        e = np.zeros(2)
        e[j] = step
        for sgn in (1, -1):
            bases.append(x)
            dirs.append(xi + sgn * e)
            tags.append(("xi", j, sgn))
            bases.append(x + sgn * e)
            dirs.append(xi)
            tags.append(("x", j, sgn))
    bases.append(x)
    dirs.append(xi)
    tags.append(("center", 0, 0))
    X = np.concatenate(bases)
    XI = np.concatenate(dirs)
    base, unit = project_base(X, XI)
    I0 = momentum_I_at(sf, 0, base, unit)
    I1 = momentum_I_at(sf, 1, base, unit)
    J0, J1, _ = J_from_I(I0, I1, np.zeros_like(I0), X, XI)
    J0 = J0.reshape(len(tags), P)
    J1 = J1.reshape(len(tags), P)
    look = {t: i for i, t in enumerate(tags)}
    dJ0 = np.stack([(J0[look["xi", j, 1]] - J0[look["xi", j, -1]]) / (2 * step) for j in range(2)], 1)
    dJ1 = np.stack([(J1[look["x", j, 1]] - J1[look["x", j, -1]]) / (2 * step) for j in range(2)], 1)
    return dJ0, dJ1, J0[look["center", 0, 0]]


def moment_relation_residual(f, x, xi, step=1e-3, order=DEFAULT_ORDER):
    """Residuals of ``d_xi J^0 - d_x J^1 = 2 V`` and of the recovery of ``d_x J^1``
    from ``X^1 = (I^0, M)`` data, at probes with unit ``xi`` and ``x ⊥ xi``.
    """
    sf = interpolant(f, order)
    x = np.atleast_2d(np.asarray(x, float))
    xi = np.atleast_2d(np.asarray(xi, float))
    dJ0, dJ1, J0 = _fd_relation_terms(sf, x, xi, step)
    V = vector_transform(sf, x, xi)
    rel = np.abs(dJ0 - dJ1 - 2 * V).max()
    # Richardson-style check: the same relation at half the step
    dJ0h, dJ1h, _ = _fd_relation_terms(sf, x, xi, step / 2)
    gap = np.abs((dJ0 - dJ1) - (dJ0h - dJ1h)).max()
    # d_eta M is linear in eta; central differences around eta = xi_perp
    eta0 = np.stack([-xi[:, 1], xi[:, 0]], axis=1)
    n2 = np.einsum("pi,pi->p", xi, xi)
    dM = []
    for k in range(2):
        e = np.zeros(2)
        e[k] = step
        dM.append((mixed_at(sf, x, xi, eta0 + e) - mixed_at(sf, x, xi, eta0 - e)) / (2 * step))
    dM = np.stack(dM, axis=1)
    recovered = dJ0 - 2 * (dM + xi / n2[:, None] * J0[:, None])
    rec = np.abs(recovered - dJ1).max()
    scale = _field(f).max_abs() * _field(f).grid.extent
    return MomentRelationResult(float(rel), float(rec), float(gap), float(scale), x.shape[0])
