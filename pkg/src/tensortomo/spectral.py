"""Component-wise Fourier transforms of grid fields.

Convention: ``f^(y) = (2 pi)^{-1} \\int f(x) exp(-i x.y) dx`` on R^2, approximated
by the rectangle rule on the grid, so ``FT(d u) = i sigma(y ⊗ u^)`` and
``FT(delta u) = i j_y u^``.  Spectra are stored in FFT order; ``y = (pi/L) k``.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import tensor_core as tc
from .grid import KIND_COMPONENTS, KIND_RANK, SYM_KIND, GridField, from_full, to_full


@dataclass
class SpectralField:
    grid: object
    kind: str
    data: np.ndarray = field(repr=False)

    @property
    def rank(self):
        return KIND_RANK[self.kind]

    @property
    def components(self):
        return KIND_COMPONENTS[self.kind]

    def full(self):
        return to_full(self.kind, self.data)

    @classmethod
    def from_full(cls, grid, kind, arr):
        return cls(grid, kind, from_full(kind, arr))

    def hermitian_defect(self):
        """Max of ``|F(y) - conj F(-y)|`` relative to ``max |F|``."""
        flipped = np.roll(self.data[:, ::-1, ::-1], 1, axis=(1, 2))
        scale = np.abs(self.data).max()
        if scale == 0:
            return 0.0
        return float(np.abs(self.data - flipped.conj()).max() / scale)


def freq_mesh(grid):
    """``Y`` of shape (2, n, n): ``Y[0]`` pairs with x1 and ``Y[1]`` with x2."""
    y = grid.freqs
    Y1, Y2 = np.meshgrid(y, y, indexing="xy")
    return np.stack([Y1, Y2])


def nyquist_mask(grid):
    """Boolean array that is False on the k = -N/2 row and column."""
    m = np.ones((grid.n, grid.n), dtype=bool)
    m[grid.n // 2, :] = False
    m[:, grid.n // 2] = False
    return m


def _phase(grid):
    # x starts at -L, so exp(-i x0 y_k) = (-1)^k per axis
    s = (-1.0) ** np.arange(grid.n)
    return np.outer(s, s)


def fft_field(f):
    g = f.grid
    spec = np.fft.fft2(f.data, axes=(1, 2)) * (g.h ** 2 / (2 * np.pi)) * _phase(g)
    return SpectralField(g, f.kind, spec)


def ifft_field(F, check_real=False):
    g = F.grid
    raw = np.fft.ifft2(F.data * _phase(g) * (2 * np.pi / g.h ** 2), axes=(1, 2))
    if check_real:
        scale = max(np.abs(raw).max(), 1e-300)
        if np.abs(raw.imag).max() > 1e-10 * scale:
            raise ValueError("inverse transform is not real")
    return GridField(g, F.kind, raw.real)


def dtft(f, Y):
    """Evaluate ``f^`` at arbitrary frequencies ``Y`` of shape (2, M).

    Returns an array of shape (ncomp, M).  Direct separable sum, independent
    of the FFT path.
    """
    g = f.grid
    x = g.coords
    Y = np.asarray(Y, float)
    E1 = np.exp(-1j * np.outer(Y[0], x))  # (M, a)
    E2 = np.exp(-1j * np.outer(Y[1], x))  # (M, b)
    out = np.einsum("mb,cba,ma->cm", E2, f.data, E1, optimize=True)
    return out * (g.h ** 2 / (2 * np.pi))


def _iy(grid):
    return 1j * freq_mesh(grid) * nyquist_mask(grid)


def spectral_d(F, order=1):
    """``FT(d^k u) = (i)^k i_y^k u^`` for a symmetric field spectrum."""
    rank = F.rank
    if F.kind not in ("scalar", "vector", "sym2", "sym3"):
        raise tc.TensorOrderError(f"d is defined on symmetric fields, not {F.kind}")
    if rank + order > tc.MAX_SYM_ORDER:
        raise tc.TensorOrderError(f"d^{order} of an order-{rank} field exceeds order {tc.MAX_SYM_ORDER}")
    iy = _iy(F.grid)
    t = F.full()
    for _ in range(order):
        t = tc.i_x_full(iy, t, rank)
        rank += 1
    return SpectralField.from_full(F.grid, SYM_KIND[rank], t)


def spectral_div(F, order=1):
    """``FT(delta^k u) = (i)^k j_y^k u^``."""
    rank = F.rank
    if F.kind not in ("vector", "sym2", "sym3"):
        raise tc.TensorOrderError(f"divergence is defined on symmetric fields, not {F.kind}")
    if order > rank:
        raise tc.TensorOrderError(f"delta^{order} needs order >= {order}, got {rank}")
    iy = _iy(F.grid)
    t = F.full()
    for _ in range(order):
        t = tc.j_x_full(iy, t, rank)
        rank -= 1
    return SpectralField.from_full(F.grid, SYM_KIND[rank], t)


def l2_norm(f):
    return float(np.sqrt(f.grid.h ** 2 * np.sum(np.abs(f.data) ** 2)))


def spectral_l2_norm(F):
    dy = np.pi / F.grid.extent
    return float(np.sqrt(dy ** 2 * np.sum(np.abs(F.data) ** 2)))
