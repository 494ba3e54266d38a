"""Differential operators on grid tensor fields.

Every operator is written once in terms of partial derivatives of component
arrays; the ``backend`` argument picks how those partials are taken:

``"spectral"``
    Fourier multipliers ``i y_j`` with the Nyquist row/column zeroed (default).
``"fd"``
    4th-order periodic central differences, kept as an independent check.

H, K and their adjoints act on elastic 2-tensors whose pairs are (ij) and (kl):

    (Hv)_ijkl  = 1/2 (d_i d_j v_kl + d_k d_l v_ij)
    (H*w)_ij   = sum_kl d_k d_l w_ijkl
    (Ku)_ijkl  = 1/4 (d_i u_j + d_j u_i) delta_kl + 1/4 (d_k u_l + d_l u_k) delta_ij
    (K*w)_i    = -sum_jk d_j w_ijkk
"""
from __future__ import annotations

import numpy as np

from . import tensor_core as tc
from .grid import SYM_KIND, UNSYM_KIND, GridField

BACKENDS = ("spectral", "fd")


def _check_backend(backend):
    if backend not in BACKENDS:
        raise ValueError(f"unknown backend {backend!r}; expected one of {BACKENDS}")


def _wavenumbers(grid, axis):
    """``i y`` along array axis for derivative direction ``axis`` (0 = x1)."""
    y = grid.freqs.copy()
    y[grid.n // 2] = 0.0
    return 1j * (y[None, :] if axis == 0 else y[:, None])


def partial(arr, axis, grid, backend="spectral"):
    """``d/dx_{axis+1}`` of arrays shaped ``(..., n, n)``."""
    _check_backend(backend)
    arr = np.asarray(arr, float)
    if backend == "spectral":
        spec = np.fft.fft2(arr, axes=(-2, -1))
        return np.fft.ifft2(spec * _wavenumbers(grid, axis), axes=(-2, -1)).real
    ax = -1 if axis == 0 else -2
    r = lambda s: np.roll(arr, -s, axis=ax)
    return (-r(2) + 8 * r(1) - 8 * r(-1) + r(-2)) / (12 * grid.h)


def partial2(arr, i, j, grid, backend="spectral"):
    """``d_i d_j`` of arrays shaped ``(..., n, n)``."""
    _check_backend(backend)
    arr = np.asarray(arr, float)
    if backend == "spectral":
        spec = np.fft.fft2(arr, axes=(-2, -1))
        mult = _wavenumbers(grid, i) * _wavenumbers(grid, j)
        return np.fft.ifft2(spec * mult, axes=(-2, -1)).real
    if i != j:
        return partial(partial(arr, i, grid, "fd"), j, grid, "fd")
    ax = -1 if i == 0 else -2
    r = lambda s: np.roll(arr, -s, axis=ax)
    return (-r(2) + 16 * r(1) - 30 * arr + 16 * r(-1) - r(-2)) / (12 * grid.h ** 2)


def _gradient_full(t, grid, backend):
    """Append a derivative index: ``out[..., j] = d_j t[...]``."""
    rank = t.ndim - 2
    parts = [partial(t, j, grid, backend) for j in range(2)]
    return np.stack(parts, axis=rank)


def tilde_d(u, backend="spectral"):
    """Full (unsymmetrized) gradient; the last index is the derivative."""
    g = u.grid
    out = _gradient_full(u.full(), g, backend)
    rank = u.rank + 1
    kind = "vector" if rank == 1 else UNSYM_KIND[rank]
    return GridField.from_full(g, kind, out)


def d(u, backend="spectral"):
    """Inner differentiation (symmetrized gradient)."""
    rank = u.rank + 1
    if u.kind not in SYM_KIND.values():
        raise tc.TensorOrderError(f"d needs a symmetric field, got {u.kind}")
    if rank > tc.MAX_SYM_ORDER:
        raise tc.TensorOrderError(f"d of an order-{u.rank} field exceeds order {tc.MAX_SYM_ORDER}")
    full = tc.sym_full(_gradient_full(u.full(), u.grid, backend), rank)
    return GridField.from_full(u.grid, SYM_KIND[rank], full)


def delta(u, backend="spectral"):
    """Divergence: contraction of the last index with the gradient."""
    if u.kind not in ("vector", "sym2", "sym3"):
        raise tc.TensorOrderError(f"divergence needs a symmetric field of order >= 1, got {u.kind}")
    t = u.full()
    rank = u.rank
    out = sum(partial(t[(slice(None),) * (rank - 1) + (j,)], j, u.grid, backend) for j in range(2))
    return GridField.from_full(u.grid, SYM_KIND[rank - 1], out)


def apply_H(v, backend="spectral"):
    if v.kind != "sym2":
        raise ValueError("H acts on sym2 fields")
    g = v.grid
    vf = v.full()
    dd = {(i, j): partial2(vf, i, j, g, backend) for i in range(2) for j in range(i, 2)}
    dd.update({(j, i): val for (i, j), val in list(dd.items())})
    out = np.zeros((2, 2, 2, 2, g.n, g.n))
    for i, j, k, l in np.ndindex(2, 2, 2, 2):
        out[i, j, k, l] = 0.5 * (dd[i, j][k, l] + dd[k, l][i, j])
    return GridField.from_full(g, "elastic2", out)


def apply_Hstar(w, backend="spectral"):
    if w.kind != "elastic2":
        raise ValueError("H* acts on elastic2 fields")
    g = w.grid
    wf = w.full()
    out = np.zeros((2, 2, g.n, g.n))
    for k in range(2):
        for l in range(2):
            out += partial2(wf[:, :, k, l], k, l, g, backend)
    return GridField.from_full(g, "sym2", out)


def apply_K(u, backend="spectral"):
    if u.kind != "vector":
        raise ValueError("K acts on vector fields")
    g = u.grid
    grad = _gradient_full(u.full(), g, backend)  # grad[j, i] = d_i u_j
    eu = grad + np.swapaxes(grad, 0, 1)  # d_i u_j + d_j u_i (symmetric)
    eye = np.eye(2)
    out = 0.25 * (np.einsum("ijab,kl->ijklab", eu, eye) + np.einsum("klab,ij->ijklab", eu, eye))
    return GridField.from_full(g, "elastic2", out)


def apply_Kstar(w, backend="spectral"):
    if w.kind != "elastic2":
        raise ValueError("K* acts on elastic2 fields")
    g = w.grid
    tr = np.einsum("ijkkab->ijab", w.full())
    out = -sum(partial(tr[:, j], j, g, backend) for j in range(2))
    return GridField.from_full(g, "vector", out)


def saint_venant_pointwise(grad):
    """Literal ``sigma(j,k){d_k f_ij - d_j f_ik}`` from ``grad[i, j, k] = d_k f_ij``.

    The bracket is antisymmetric in (j, k), so the symmetrization returns zero
    for every input.
    """
    grad = np.asarray(grad)
    bracket = grad - np.swapaxes(grad, 1, 2)
    return 0.5 * (bracket + np.swapaxes(bracket, 1, 2))


def saint_venant_literal(f, backend="spectral"):
    if f.kind != "sym2":
        raise ValueError("the Saint-Venant operator acts on sym2 fields")
    grad = _gradient_full(f.full(), f.grid, backend)
    return GridField.from_full(f.grid, "tensor3", saint_venant_pointwise(grad))


def compatibility_2d(f, backend="spectral"):
    """``d22 f11 + d11 f22 - 2 d12 f12``; vanishes exactly on Hessians."""
    if f.kind != "sym2":
        raise ValueError("compatibility_2d acts on sym2 fields")
    g = f.grid
    f11, f12, f22 = f.data
    out = (partial2(f11, 1, 1, g, backend) + partial2(f22, 0, 0, g, backend)
           - 2.0 * partial2(f12, 0, 1, g, backend))
    return GridField(g, "scalar", out[None])
