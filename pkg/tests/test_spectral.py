import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from tensortomo.diffops import d, delta
from tensortomo.grid import GaussPoly, GridField, gen_gaussian, gen_hessian_field, gen_random_bandlimited, gen_random_decaying
from tensortomo.oracles import gaussian_hat
from tensortomo.spectral import (SpectralField, dtft, fft_field, freq_mesh, ifft_field, l2_norm, spectral_d,
                                 spectral_div, spectral_l2_norm)
from tensortomo.tensor_core import TensorOrderError


def test_gaussian_transform(grid):
    f = gen_gaussian(grid, "sym2", weights=[1, 0, 0])
    F = fft_field(f)
    assert np.abs(F.data[0] - gaussian_hat(freq_mesh(grid))).max() <= 1e-9
    assert np.abs(F.data[1]).max() == 0


def test_dtft_matches_fft(grid):
    f = gen_random_decaying(grid, "vector", 3)
    Y = freq_mesh(grid)[:, 5, :7].reshape(2, -1)
    assert np.allclose(dtft(f, Y), fft_field(f).data[:, 5, :7].reshape(2, -1), atol=1e-12)


def test_constant_shift_only_dc(grid):
    f = gen_gaussian(grid, "scalar")
    F0, F1 = fft_field(f).data, fft_field(GridField(grid, "scalar", f.data + 0.3)).data
    diff = np.abs(F1 - F0)
    diff[0, 0, 0] = 0
    assert diff.max() <= 1e-12


@given(st.integers(0, 1000), st.sampled_from(["scalar", "vector", "sym2", "elastic2"]))
def test_roundtrip_parseval_hermitian(seed, kind):
    from tensortomo.grid import Grid2
    g = Grid2(32, 4.0)
    f = gen_random_bandlimited(g, kind, seed, cutoff=0.5, mean_zero=False)
    F = fft_field(f)
    assert np.abs(ifft_field(F).data - f.data).max() <= 1e-12 * f.max_abs()
    assert spectral_l2_norm(F) == pytest.approx(l2_norm(f), rel=1e-10)
    assert F.hermitian_defect() <= 1e-12


def test_spectral_hessian_matches_analytic(grid):
    v = GaussPoly.gaussian((0.1, -0.2), 1.0)
    vf = GridField(grid, "scalar", v.on(grid)[None])
    got = ifft_field(spectral_d(fft_field(vf), 2))
    want = gen_hessian_field(grid, v)
    assert np.abs(got.data - want.data).max() <= 1e-9 * want.max_abs()


def test_d2_symbol(grid):
    vf = GridField(grid, "scalar", GaussPoly.gaussian().on(grid)[None])
    V = fft_field(vf)
    Y = freq_mesh(grid)
    Y[:, grid.n // 2, :] = 0
    Y[:, :, grid.n // 2] = 0
    D2 = spectral_d(V, 2).full()
    assert np.allclose(D2, -np.einsum("iab,jab->ijab", Y, Y) * V.data[0], atol=1e-15)


def test_biharmonic(grid):
    # delta^2 d^2 v = Laplacian^2 v; for exp(-r^2): (16 r^4 - 64 r^2 + 32) exp(-r^2)
    v = GaussPoly.gaussian()
    vf = GridField(grid, "scalar", v.on(grid)[None])
    out = ifft_field(spectral_div(spectral_d(fft_field(vf), 2), 2)).data[0]
    X1, X2 = grid.mesh()
    r2 = X1 ** 2 + X2 ** 2
    want = (16 * r2 ** 2 - 64 * r2 + 32) * np.exp(-r2)
    assert np.abs(out - want).max() <= 1e-9 * 32


def test_spectral_d_matches_fd(grid):
    f = gen_random_bandlimited(grid, "vector", 2, cutoff=0.1)
    sp = ifft_field(spectral_d(fft_field(f), 1))
    fd = d(f, backend="fd")
    # stencil error for a mode y is about (y h)^4 / 30 relative
    assert np.abs(sp.data - fd.data).max() <= 2e-3 * sp.max_abs()


def test_order_errors(grid):
    F = fft_field(gen_random_bandlimited(grid, "sym2", 1))
    with pytest.raises(TensorOrderError):
        spectral_d(F, 2)
    with pytest.raises(TensorOrderError):
        spectral_div(fft_field(gen_random_bandlimited(grid, "vector", 1)), 2)
    z = spectral_div(SpectralField(grid, "sym2", np.zeros((3, grid.n, grid.n), complex)), 1)
    assert not z.data.any()


@pytest.mark.parametrize("kind,up", [("scalar", "vector"), ("vector", "sym2"), ("sym2", "sym3")])
def test_d_delta_adjoint(grid, kind, up):
    u = gen_random_decaying(grid, kind, 1)
    w = gen_random_decaying(grid, up, 2)
    lhs, rhs = d(u).inner(w), -u.inner(delta(w))
    assert lhs == pytest.approx(rhs, rel=1e-9)


def test_bandlimited_commutes(grid):
    f = gen_random_bandlimited(grid, "sym2", 4)
    via_space = fft_field(delta(f))
    via_spec = spectral_div(fft_field(f), 1)
    assert np.abs(via_space.data - via_spec.data).max() <= 1e-12 * np.abs(via_spec.data).max()
