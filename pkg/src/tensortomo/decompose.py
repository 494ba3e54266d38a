"""Solenoidal/potential splits in the frequency domain.

Symbol operators act without factors of ``i``:

    (H_y v)_ijkl = 1/2 (y_i y_j v_kl + y_k y_l v_ij)      (H*_y w)_ij = y_k y_l w_ijkl
    (K_y u)_ijkl = 1/4 (y_i u_j + y_j u_i) I_kl + 1/4 (y_k u_l + y_l u_k) I_ij
    (K*_y w)_j   = y_i w_ijkk

True Fourier multipliers carry the ``i`` factors: ``FT(d^2 v) = -y⊗y v^``,
``FT(Hv) = -H_y v^`` and ``FT(Ku) = i K_y u^``.  The sign conversions live in
:func:`decompose_sym2` and :func:`decompose_elastic` only.

All pointwise routines accept full tensors with trailing batch axes, so the
same code handles a single frequency and a whole spectrum.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .diffops import apply_H, apply_K, partial2
from .grid import GridField, mean_integral
from .spectral import SpectralField, dtft, fft_field, freq_mesh, ifft_field, nyquist_mask

I2 = np.eye(2)
PROBE_DIRECTIONS = np.array([[1.0, 0.0], [0.0, 1.0],
                             [1 / np.sqrt(2), 1 / np.sqrt(2)], [1 / np.sqrt(2), -1 / np.sqrt(2)]])


class MeanZeroError(ValueError):
    """The field violates the vanishing-integral hypothesis of the decomposition."""

    def __init__(self, means, l1, tol):
        self.means = np.asarray(means)
        self.l1 = float(l1)
        self.tol = float(tol)
        super().__init__(f"component integrals {self.means.tolist()} exceed {tol:g} * ||f||_1 = {tol * l1:.3g}")


# ---------------------------------------------------------------------------
# symbol operators (full arrays, index axes first)
# ---------------------------------------------------------------------------

def hat_H(y, v):
    yy = np.einsum("i...,j...->ij...", y, y)
    return 0.5 * (np.einsum("ij...,kl...->ijkl...", yy, v) + np.einsum("kl...,ij...->ijkl...", yy, v))


def hat_Hstar(y, w):
    return np.einsum("k...,l...,ijkl...->ij...", y, y, w)


def hat_K(y, u):
    s = np.einsum("i...,j...->ij...", y, u)
    s = s + np.swapaxes(s, 0, 1)
    return 0.25 * (np.einsum("ij...,kl->ijkl...", s, I2) + np.einsum("kl...,ij->ijkl...", s, I2))


def hat_Kstar(y, w):
    return np.einsum("i...,ijkk...->j...", y, w)


def _check_y(y):
    y = np.asarray(y, float)
    if np.any(np.sum(y * y, axis=0) == 0):
        raise ValueError("the pointwise split is undefined at y = 0")
    return y


# ---------------------------------------------------------------------------
# symmetric 2-tensors
# ---------------------------------------------------------------------------

def split_sym2_full(F, y):
    """``F = G + y⊗y V`` with ``y_i y_j G_ij = 0``; returns ``(G, V)``."""
    y = _check_y(y)
    y2 = np.sum(y * y, axis=0)
    yy = np.einsum("i...,j...->ij...", y, y)
    V = np.einsum("ij...,ij...->...", yy, F) / y2 ** 2
    return F - yy * V, V


def pointwise_split_sym2(f_hat, y):
    """Split a (complex) symmetric 2-tensor symbol at frequency ``y``.

    ``f_hat`` is a 2x2 array or anything with ``.full()``.
    Returns ``(g_hat, v_hat)``.
    """
    F = f_hat.full() if hasattr(f_hat, "full") else np.asarray(f_hat)
    return split_sym2_full(F, np.asarray(y, float))


@dataclass
class Sym2Split:
    g: GridField
    v: GridField
    residuals: dict = field(default_factory=dict)
    means: np.ndarray = None

    def passes(self, tol):
        return all(r <= tol for r in self.residuals.values())


def _mean_gate(f, mean_tol):
    means = mean_integral(f)
    l1 = f.l1()
    if np.any(np.abs(means) > mean_tol * l1):
        raise MeanZeroError(means, l1, mean_tol)
    return means


def _masked_y(grid):
    Y = freq_mesh(grid)
    mask = nyquist_mask(grid)
    mask[0, 0] = False  # DC bin is handled separately
    return Y, mask


def _safe_y(Y, mask):
    # a dummy y on masked bins keeps the formulas finite; those bins are overwritten
    Ys = Y.copy()
    Ys[0][~mask] = 1.0
    Ys[1][~mask] = 0.0
    return Ys


def sym2_residuals(f, g, v):
    """Residual norms of ``f = g + d^2 v``, ``delta^2 g = 0``.

    ``d^2 v`` uses the spectral derivative backend; ``delta^2 g`` is measured
    on the spectrum of ``g`` relative to ``max |y|^2 |f^|``.
    """
    grid = f.grid
    fscale = max(f.max_abs(), 1e-300)
    vv = v.data[0]
    d2v = np.stack([partial2(vv, 0, 0, grid), partial2(vv, 0, 1, grid), partial2(vv, 1, 1, grid)])
    recon = np.abs(f.data - g.data - d2v).max() / fscale
    Y = freq_mesh(grid) * nyquist_mask(grid)
    G = fft_field(g).full()
    F = fft_field(f).full()
    y2 = np.sum(Y * Y, axis=0)
    sol = np.abs(np.einsum("iab,jab,ijab->ab", Y, Y, G)).max()
    fden = max((y2 * np.sqrt(np.sum(np.abs(F) ** 2, axis=(0, 1)))).max(), 1e-300)
    return {"reconstruction": float(recon), "delta2_g": float(sol / fden)}


def decompose_sym2(f, mean_tol=1e-10):
    """``f = g + d^2 v`` with ``delta^2 g = 0`` for a mean-zero sym2 field.

    The additive constant of ``v`` is not determined by ``f``; the returned
    ``v`` has zero grid mean.
    """
    if f.kind != "sym2":
        raise ValueError(f"decompose_sym2 needs a sym2 field, got {f.kind}")
    means = _mean_gate(f, mean_tol)
    grid = f.grid
    F = fft_field(f).full()
    Y, mask = _masked_y(grid)
    G, V = split_sym2_full(F, _safe_y(Y, mask))
    G[:, :, ~mask] = F[:, :, ~mask]
    V[~mask] = 0.0
    g = ifft_field(SpectralField.from_full(grid, "sym2", G))
    # pointwise split: f^ = g^ + y⊗y V, while FT(d^2 v) = -y⊗y v^
    v = ifft_field(SpectralField(grid, "scalar", -V[None]))
    out = Sym2Split(g, v, means=means)
    out.residuals = sym2_residuals(f, g, v)
    return out


# ---------------------------------------------------------------------------
# mean-zero diagnostic
# ---------------------------------------------------------------------------

@dataclass
class MeanProbe:
    directions: np.ndarray
    radii: np.ndarray
    coefficients: np.ndarray
    expected: np.ndarray
    lattice_values: np.ndarray

    @property
    def ratios(self):
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.where(self.expected > 0, self.coefficients / self.expected, np.nan)

    def as_dict(self):
        return {"directions": self.directions.tolist(), "radii": self.radii.tolist(),
                "coefficients": self.coefficients.tolist(), "expected": self.expected.tolist(),
                "ratios": [None if np.isnan(r) else float(r) for r in self.ratios],
                "lattice_values": self.lattice_values.tolist()}


def mean_zero_necessity_probe(f, pad=16):
    """Estimate ``lim_{y->0} |y|^2 |v^(y)|`` along four directions.

    By the split, ``|y|^2 v^(r w) = w.f^(r w).w``, whose limit is
    ``w.f^(0).w``; a nonzero limit means ``v^`` is not locally integrable
    and no decaying potential exists.  The limit is extrapolated from the
    three radii ``k pi / (pad L)`` with an even quadratic fit.  The values
    at the smallest lattice frequencies are reported alongside.
    """
    if f.kind != "sym2":
        raise ValueError("the probe acts on sym2 fields")
    grid = f.grid
    r1 = np.pi / (pad * grid.extent)
    radii = r1 * np.arange(1, 4)
    W = PROBE_DIRECTIONS
    # Lagrange weights extrapolating samples at r^2 = 1, 4, 9 to r^2 = 0
    lagrange = np.array([1.5, -0.6, 0.1])
    F0 = SpectralField(grid, "sym2", (mean_integral(f) / (2 * np.pi))[:, None]).full()[..., 0]
    coefs, expected, lattice = [], [], []
    for w in W:
        Yd = np.outer(w, radii)
        F = SpectralField(grid, "sym2", dtft(f, Yd)).full()
        vals = np.einsum("i,j,ijm->m", w, w, F).real
        coefs.append(abs(lagrange @ vals))
        expected.append(abs(w @ F0 @ w))
        Yl = np.outer(w, np.pi / grid.extent * np.arange(1, 4) * (np.sqrt(2) if w[0] * w[1] != 0 else 1))
        Fl = SpectralField(grid, "sym2", dtft(f, Yl)).full()
        lattice.append(np.abs(np.einsum("i,j,ijm->m", w, w, Fl)))
    return MeanProbe(W.copy(), radii, np.array(coefs), np.array(expected), np.array(lattice))


# ---------------------------------------------------------------------------
# elastic 2-tensors
# ---------------------------------------------------------------------------

def split_elastic_full(F, y):
    """Solve ``F = H_y V + K_y U + G`` with ``<U, y> = 0`` and ``H*_y G = K*_y G = 0``.

    ``F`` has shape (2, 2, 2, 2, ...), ``y`` shape (2, ...).  Returns
    ``(V, U, G)`` as full arrays.
    """
    y = _check_y(y)
    y2 = np.sum(y * y, axis=0)
    eps = I2.reshape((2, 2) + (1,) * (y.ndim - 1)) - np.einsum("i...,j...->ij...", y, y) / y2
    KsF = hat_Kstar(y, F)
    HsF = hat_Hstar(y, F)
    y4F = np.einsum("i...,j...,ij...->...", y, y, HsF)
    U = 4.0 / y2 ** 2 * (y2 * np.einsum("ij...,j...->i...", eps, KsF)
                         - np.einsum("ij...,j...->i...", HsF, y) + y / y2 * y4F)
    yu = np.einsum("i...,j...->ij...", y, U)
    V = (2.0 * HsF / y2 ** 2 - (yu + np.swapaxes(yu, 0, 1)) / (2.0 * y2)
         - np.einsum("i...,j...->ij...", y, y) * y4F / y2 ** 4)
    G = F - hat_H(y, V) - hat_K(y, U)
    return V, U, G


def pointwise_split_elastic(f_hat, y):
    """Split an elastic 2-tensor symbol; returns ``(v_hat, u_hat, g_hat)`` full arrays."""
    F = f_hat.full() if hasattr(f_hat, "full") else np.asarray(f_hat)
    return split_elastic_full(F, np.asarray(y, float))


@dataclass
class ElasticSplit:
    v: GridField
    u: GridField
    g: GridField
    residuals: dict = field(default_factory=dict)
    means: np.ndarray = None

    def passes(self, tol):
        return all(r <= tol for r in self.residuals.values())


def elastic_residuals(f, v, u, g, U=None):
    grid = f.grid
    fscale = max(f.max_abs(), 1e-300)
    recon = np.abs(f.data - apply_H(v).data - apply_K(u).data - g.data).max() / fscale
    Y = freq_mesh(grid) * nyquist_mask(grid)
    y2 = np.sum(Y * Y, axis=0)
    Gs = fft_field(g).full()
    Fs = fft_field(f).full()
    fmag = np.sqrt(np.sum(np.abs(Fs) ** 2, axis=(0, 1, 2, 3)))
    hs = np.abs(hat_Hstar(Y, Gs)).max() / max((y2 * fmag).max(), 1e-300)
    ks = np.abs(hat_Kstar(Y, Gs)).max() / max((np.sqrt(y2) * fmag).max(), 1e-300)
    out = {"reconstruction": float(recon), "Hstar_g": float(hs), "Kstar_g": float(ks)}
    if U is not None:
        udot = np.abs(np.einsum("iab,iab->ab", Y, U)).max()
        out["u_dot_y"] = float(udot / max((np.sqrt(y2) * np.sqrt(np.sum(np.abs(U) ** 2, axis=0))).max(), 1e-300))
    return out


def decompose_elastic(f, mean_tol=1e-10):
    """``f = Hv + Ku + g`` with ``H*g = K*g = 0`` and ``div u = 0``.

    ``v`` is returned with zero grid mean (constants lie in the kernel of H).
    """
    if f.kind != "elastic2":
        raise ValueError(f"decompose_elastic needs an elastic2 field, got {f.kind}")
    means = _mean_gate(f, mean_tol)
    grid = f.grid
    F = fft_field(f).full()
    Y, mask = _masked_y(grid)
    V, U, G = split_elastic_full(F, _safe_y(Y, mask))
    G[..., ~mask] = F[..., ~mask]
    V[..., ~mask] = 0.0
    U[..., ~mask] = 0.0
    g = ifft_field(SpectralField.from_full(grid, "elastic2", G))
    # FT(Hv) = -H_y v^ and FT(Ku) = i K_y u^
    v = ifft_field(SpectralField.from_full(grid, "sym2", -V))
    u = ifft_field(SpectralField.from_full(grid, "vector", -1j * U))
    out = ElasticSplit(v, u, g, means=means)
    out.residuals = elastic_residuals(f, v, u, g, U)
    return out
