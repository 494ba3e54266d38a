import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from tensortomo import raytransforms as rt
from tensortomo.grid import DecayGateError, GaussPoly, Grid2, GridField, gen_gaussian, gen_hessian_field
from tensortomo.verify import elastic_potential_fixture, gaussian_sym2

SQRT_PI = np.sqrt(np.pi)


@pytest.fixture(scope="module")
def g():
    return Grid2(128, 6.0)


@pytest.fixture(scope="module")
def lines(g):
    return rt.LineGrid.for_grid(g)


@pytest.fixture(scope="module")
def f11(g):
    return gen_gaussian(g, "sym2", weights=[1, 0, 0])


def test_linegrid(g, lines):
    assert lines.tau == g.h / 2 and lines.tmax == pytest.approx(6 * np.sqrt(2))
    base, xi, xp = lines.rays()
    assert base.shape == (64 * 129, 2)
    assert np.allclose(np.sum(xi * xp, axis=1), 0)
    with pytest.raises(ValueError):
        rt.LineGrid.for_grid(g, tau=g.h)


def test_momentum_I_gaussian(f11, lines):
    s0 = rt.momentum_I(f11, 0, lines)["i0"]
    assert s0[0, 64] == pytest.approx(SQRT_PI, abs=1e-6)
    assert rt.momentum_I(f11, 1, lines)["i1"][0, 64] == pytest.approx(0, abs=1e-8)
    assert np.abs(s0[32]).max() <= 1e-12  # xi = (0, 1) sees f22 = 0


def test_momentum_I_offsets(f11, lines):
    s0 = rt.momentum_I(f11, 0, lines)["i0"]
    offs = lines.offsets
    # along e1 at offset s the integral is sqrt(pi) exp(-s^2)
    assert np.abs(s0[0] - SQRT_PI * np.exp(-offs ** 2)).max() <= 1e-6


def test_momentum_I2(f11):
    assert rt.momentum_J_direct(f11, 2, [0, 0], [1, 0]) == pytest.approx(SQRT_PI / 2, abs=1e-6)


def test_J_direct_examples(f11):
    assert rt.momentum_J_direct(f11, 0, [0, 0], [2, 0]) == pytest.approx(2 * SQRT_PI, abs=1e-6)
    assert rt.momentum_J_direct(f11, 1, [1, 0], [1, 0]) == pytest.approx(-SQRT_PI, abs=1e-6)
    with pytest.raises(ValueError):
        rt.momentum_J_direct(f11, 0, [0, 0], [0, 0])


def test_J_from_I_examples(f11):
    I0 = rt.momentum_I_at(f11, 0, [0, 0], [1, 0])
    I1 = rt.momentum_I_at(f11, 1, [0, 0], [1, 0])
    J0, J1, _ = rt.J_from_I(I0, I1, 0.0, np.array([0.0, 0.0]), np.array([1.0, 0.0]))
    assert (J0, J1) == (I0, I1)
    J = rt.momentum_J_via_I(f11, [0, 0], [2, 0])
    assert J[0][0] == pytest.approx(2 * SQRT_PI, abs=1e-6)
    J = rt.momentum_J_via_I(f11, [1, 0], [1, 0])
    assert J[1][0] == pytest.approx(-SQRT_PI, abs=1e-6)


@given(st.floats(0, 2 * np.pi), st.floats(0.5, 2.0), st.floats(-2, 2), st.floats(-2, 2))
def test_J_direct_vs_I(phi, r, x1, x2):
    f = _gauss()
    xi = r * np.array([np.cos(phi), np.sin(phi)])
    x = np.array([x1, x2])
    via = rt.momentum_J_via_I(f, x, xi)
    for q in range(3):
        direct = rt.momentum_J_direct(f, q, x, xi)
        assert direct == pytest.approx(via[q][0], abs=1e-7)


_CACHE = {}


def _gauss():
    if "f" not in _CACHE:
        _CACHE["f"] = rt.interpolant(gaussian_sym2(Grid2(128, 6.0)))
    return _CACHE["f"]


@given(st.floats(0, np.pi), st.floats(-3, 3))
def test_orientation_symmetry(phi, s):
    f = _gauss()
    xi = np.array([np.cos(phi), np.sin(phi)])
    x = s * np.array([-xi[1], xi[0]])
    for q, sign in ((0, 1), (1, -1), (2, 1)):
        a = rt.momentum_I_at(f, q, x, xi)
        b = rt.momentum_I_at(f, q, x, -xi)
        assert b == pytest.approx(sign * a, abs=1e-12)


def test_elastic_X1_matches_I0(g, lines):
    f = gaussian_sym2(g)
    x1 = rt.elastic_X(f, 1, lines)
    assert np.array_equal(x1["x1_long"], rt.momentum_I(f, 0, lines)["i0"])
    assert np.array_equal(x1["x1_perp"], rt.mixed_M(f, lines)["mixed"])


def test_elastic_X2_isotropic(g, lines):
    d = np.eye(2)
    env = GaussPoly.gaussian().on(g)
    full = np.einsum("ij,kl,ab->ijklab", d, d, env)
    f = GridField.from_full(g, "elastic2", full)
    x2 = rt.elastic_X(f, 2, lines)
    assert np.abs(x2["x2_perp"]).max() <= 1e-14
    assert x2["x2_long"][0, 64] == pytest.approx(SQRT_PI, abs=1e-6)


def test_elastic_X2_kernel(g, lines):
    f, _, _ = elastic_potential_fixture(g)
    x2 = rt.elastic_X(f, 2, lines)
    assert x2.max_abs() <= 1e-6 * f.max_abs() * g.extent


def test_mixed_examples(g, lines, f11):
    assert np.abs(rt.mixed_M(f11, lines)["mixed"][0]).max() <= 1e-15
    f12 = gen_gaussian(g, "sym2", weights=[0, 1, 0])
    assert rt.mixed_M(f12, lines)["mixed"][0, 64] == pytest.approx(SQRT_PI, abs=1e-6)


def test_kind_errors(g, lines, f11):
    with pytest.raises(ValueError):
        rt.momentum_I(f11, 3, lines)
    with pytest.raises(ValueError):
        rt.elastic_X(f11, 2, lines)
    with pytest.raises(ValueError):
        rt.mixed_M(GridField.zeros(g, "elastic2"), lines)
    bad = GridField(g, "sym2", np.ones((3, g.n, g.n)))
    with pytest.raises(DecayGateError):
        rt.momentum_I(bad, 0, lines)


def test_hessian_kernel(g, lines):
    h = gen_hessian_field(g, GaussPoly.gaussian((0.3, -0.2), 0.9))
    for q in (0, 1):
        assert rt.momentum_I(h, q, lines).max_abs() <= 1e-6 * h.max_abs() * g.extent


def test_fourier_slice(g, f11):
    res = rt.fourier_slice_check(f11, 0.0)
    closed = np.pi / np.sqrt(2 * np.pi) * np.exp(-res.sigma ** 2 / 4)
    assert np.abs(res.lhs - closed).max() <= 1e-6 * closed.max()
    assert np.abs(res.rhs - closed).max() <= 1e-6 * closed.max()
    assert np.abs(res.sigma).max() <= 8
    h = gen_hessian_field(g, GaussPoly.gaussian())
    for phi in (0.0, 0.4, 1.3):
        r = rt.fourier_slice_check(h, phi)
        assert np.abs(r.lhs).max() <= 1e-6 and np.abs(r.rhs).max() <= 1e-6
    z = rt.fourier_slice_check(GridField.zeros(g, "sym2"), 0.7)
    assert not np.abs(z.lhs).any() and not np.abs(z.rhs).any()


def test_moment_relation(g):
    x, xi = rt.random_probes(32, 0)
    res = rt.moment_relation_residual(gaussian_sym2(g), x, xi)
    assert res.relation_residual <= 1e-4 * res.scale
    assert res.recovery_residual <= 1e-4 * res.scale
    assert res.richardson_gap <= 1e-4 * res.scale
    zero = rt.moment_relation_residual(GridField.zeros(g, "sym2"), x, xi)
    assert zero.relation_residual == 0 and zero.recovery_residual == 0


def test_sinogram_csv(tmp_path, f11):
    small = rt.LineGrid.for_grid(f11.grid, n_angles=4, n_offsets=5)
    s = rt.elastic_X(f11, 1, small)
    path = tmp_path / "s.csv"
    s.to_csv(path)
    header = path.read_text().splitlines()[0]
    assert header == "phi,s,channel,value"
    back = rt.Sinogram.read_csv(path, small)
    for c in s.channels:
        assert np.array_equal(back[c], s[c])
