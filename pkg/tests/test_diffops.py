import numpy as np
import pytest

from tensortomo import tensor_core as tc
from tensortomo.decompose import hat_H, hat_Hstar
from tensortomo.diffops import (apply_H, apply_Hstar, apply_K, apply_Kstar, compatibility_2d, d, partial,
                                saint_venant_literal, saint_venant_pointwise, tilde_d)
from tensortomo.grid import GaussPoly, GridField, gen_gaussian, gen_hessian_field, gen_random_bandlimited, gen_random_decaying, gen_sym2, gen_vector
from tensortomo.spectral import fft_field, freq_mesh, nyquist_mask


def centre(f, comp):
    n = f.grid.n
    return f.component(comp)[n // 2, n // 2]


def test_H_example(grid):
    v = gen_sym2(grid, (GaussPoly.monomial(0, 2, width=0.9), None, None))
    assert centre(apply_H(v), "w1122") == pytest.approx(1.0, abs=1e-9)
    assert not apply_H(GridField.zeros(grid, "sym2")).data.any()


def test_K_example(grid):
    u = gen_vector(grid, (GaussPoly.monomial(0, 1, width=0.9), None))
    assert centre(apply_K(u), "w1112") == pytest.approx(0.25, abs=1e-9)
    assert not apply_K(GridField.zeros(grid, "vector")).data.any()


@pytest.mark.parametrize("backend", ["spectral", "fd"])
def test_adjoint_pairs(grid, backend):
    v = gen_random_decaying(grid, "sym2", 11)
    u = gen_random_decaying(grid, "vector", 12)
    w = gen_random_decaying(grid, "elastic2", 13)
    tol = 1e-8 if backend == "spectral" else 1e-4
    assert apply_H(v, backend).inner(w) == pytest.approx(v.inner(apply_Hstar(w, backend)), rel=tol)
    assert apply_K(u, backend).inner(w) == pytest.approx(u.inner(apply_Kstar(w, backend)), rel=tol)


def test_backends_agree(grid):
    v = gen_random_bandlimited(grid, "sym2", 3, cutoff=0.1)
    a, b = apply_H(v, "spectral"), apply_H(v, "fd")
    assert np.abs(a.data - b.data).max() <= 1e-3 * a.max_abs()


def test_HstarH_symbol(grid):
    v = gen_random_bandlimited(grid, "sym2", 8)
    lhs = fft_field(apply_Hstar(apply_H(v))).full()
    Y = freq_mesh(grid) * nyquist_mask(grid)
    V = fft_field(v).full()
    rhs = hat_Hstar(Y, hat_H(Y, V))
    assert np.abs(lhs - rhs).max() <= 1e-10 * np.abs(rhs).max()


def test_H_of_isotropic_scalar(grid):
    # v_kl = delta_kl phi gives (Hv)_ijkl = 1/2 (d_i d_j phi delta_kl + d_k d_l phi delta_ij)
    phi = GaussPoly.gaussian()
    v = gen_sym2(grid, (phi, None, phi))
    hess = gen_hessian_field(grid, phi).full()
    want = 0.5 * (np.einsum("ijab,kl->ijklab", hess, np.eye(2)) + np.einsum("klab,ij->ijklab", hess, np.eye(2)))
    assert np.abs(apply_H(v).full() - want).max() <= 1e-9


def test_tilde_d(grid):
    u = gen_random_decaying(grid, "vector", 4)
    sym = tc.sym_full(tilde_d(u).full(), 2)
    assert np.abs(sym - d(u).full()).max() <= 1e-12
    const = GridField(grid, "vector", np.ones((2, grid.n, grid.n)))
    assert np.abs(tilde_d(const).data).max() <= 1e-12
    x1 = gen_vector(grid, (GaussPoly.monomial(1, 0, width=0.9), None))
    grad = tilde_d(x1).full()
    c = grid.n // 2
    assert grad[0, 0, c, c] == pytest.approx(1.0, abs=1e-9)
    assert grad[0, 1, c, c] == pytest.approx(0.0, abs=1e-9)


def test_saint_venant_literal_vanishes(grid, rng):
    grad = rng.standard_normal((2, 2, 2, 500))
    grad = 0.5 * (grad + np.swapaxes(grad, 0, 1))
    assert np.abs(saint_venant_pointwise(grad)).max() <= 1e-14
    f = gen_random_decaying(grid, "sym2", 3)
    assert np.abs(saint_venant_literal(f).data).max() == 0.0
    assert not saint_venant_literal(gen_hessian_field(grid, GaussPoly.gaussian())).data.any()


def test_compatibility(grid):
    h = gen_hessian_field(grid, GaussPoly.gaussian((0.2, 0.1), 0.9))
    assert compatibility_2d(h).max_abs() <= 1e-9 * h.max_abs()
    f = gen_gaussian(grid, "sym2", weights=[1, 0, 0])
    c = grid.n // 2
    assert compatibility_2d(f).data[0, c, c] == pytest.approx(-2.0, abs=1e-10)
    assert not compatibility_2d(GridField.zeros(grid, "sym2")).data.any()


def test_fd_partial_order(grid):
    errs = []
    for n in (64, 128):
        from tensortomo.grid import Grid2
        g = Grid2(n, 6.0)
        p = GaussPoly.gaussian((0.1, 0.0), 1.0)
        errs.append(np.abs(partial(p.on(g), 0, g, "fd") - p.d(0).on(g)).max())
    assert errs[0] / errs[1] > 12  # 4th order: ratio near 16


def test_unknown_backend(grid):
    with pytest.raises(ValueError):
        partial(np.zeros((grid.n, grid.n)), 0, grid, "magic")
