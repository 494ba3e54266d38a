import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from tensortomo.decompose import (MeanZeroError, decompose_elastic, decompose_sym2, hat_H, hat_Hstar, hat_K,
                                  hat_Kstar, mean_zero_necessity_probe, pointwise_split_elastic,
                                  pointwise_split_sym2)
from tensortomo.grid import GaussPoly, GridField, gen_gaussian, gen_hessian_field, gen_random_bandlimited, gen_sym2
from tensortomo.oracles import brute_eps, lstsq_split_elastic
from tensortomo.verify import elastic_potential_fixture, mexican_hat

finite = st.floats(-5, 5, allow_nan=False, allow_infinity=False)
nonzero_y = arrays(np.float64, 2, elements=st.floats(-3, 3)).filter(lambda y: np.linalg.norm(y) > 0.05)
raw4 = arrays(np.float64, (2,) * 4, elements=finite)


def test_sym2_pointwise_example():
    g, v = pointwise_split_sym2(np.array([[2.0, 3.0], [3.0, 5.0]]), [1.0, 0.0])
    assert v == pytest.approx(2.0)
    assert np.allclose(g, [[0, 3], [3, 5]])
    y = np.array([0.3, -1.1])
    g, v = pointwise_split_sym2(np.outer(y, y), y)
    assert v == pytest.approx(1.0) and np.allclose(g, 0, atol=1e-15)
    with pytest.raises(ValueError):
        pointwise_split_sym2(np.eye(2), [0.0, 0.0])


@given(arrays(np.float64, (2, 2), elements=finite), nonzero_y)
def test_sym2_pointwise_reconstruction(a, y):
    F = a + a.T
    g, v = pointwise_split_sym2(F, y)
    scale = max(np.abs(F).max(), 1e-300)
    assert np.abs(F - g - np.outer(y, y) * v).max() <= 1e-13 * max(scale, 1)
    assert abs(y @ g @ y) <= 1e-13 * max(scale * (y @ y), 1e-300) + 1e-300


def test_elastic_pointwise_examples(rng):
    y = np.array([0.0, 1.0])
    v0 = rng.standard_normal((2, 2))
    v0 = v0 + v0.T
    V, U, G = pointwise_split_elastic(hat_H(y, v0), y)
    assert np.allclose(V, v0) and np.allclose(U, 0) and np.allclose(G, 0, atol=1e-14)
    u0 = np.array([1.7, 0.0])  # perpendicular to y
    V, U, G = pointwise_split_elastic(hat_K(y, u0), y)
    assert np.allclose(V, 0, atol=1e-14) and np.allclose(U, u0) and np.allclose(G, 0, atol=1e-14)
    with pytest.raises(ValueError):
        pointwise_split_elastic(np.zeros((2,) * 4), [0.0, 0.0])


@given(raw4, raw4, nonzero_y)
def test_elastic_pointwise_properties(a, b, y):
    F = brute_eps(a + 1j * b)
    fs = max(np.abs(F).max(), 1e-12)
    ny = np.linalg.norm(y)
    V, U, G = pointwise_split_elastic(F, y)
    assert np.abs(F - hat_H(y, V) - hat_K(y, U) - G).max() <= 1e-12 * fs
    assert abs(U @ y) <= 1e-12 * fs
    assert np.abs(hat_Hstar(y, G)).max() <= 1e-12 * fs * ny ** 2
    assert np.abs(hat_Kstar(y, G)).max() <= 1e-12 * fs * ny
    Vo, Uo, Go = lstsq_split_elastic(F, y)
    assert ny ** 2 * np.abs(V - Vo).max() <= 1e-12 * fs
    assert ny * np.abs(U - Uo).max() <= 1e-12 * fs
    assert np.abs(G - Go).max() <= 1e-12 * fs


@given(raw4, nonzero_y, st.floats(0.25, 4.0))
def test_elastic_homogeneity(a, y, s):
    F = brute_eps(a)
    V1, U1, G1 = pointwise_split_elastic(F, y)
    V2, U2, G2 = pointwise_split_elastic(F, s * y)
    fs = max(np.abs(F).max(), 1e-12)
    assert np.abs(G1 - G2).max() <= 1e-12 * fs
    assert np.abs(U1 / s - U2).max() <= 1e-11 * fs / np.linalg.norm(s * y)
    assert np.abs(V1 / s ** 2 - V2).max() <= 1e-11 * fs / np.linalg.norm(s * y) ** 2


@given(arrays(np.float64, (2, 2), elements=finite), nonzero_y, st.floats(0.25, 4.0))
def test_sym2_homogeneity(a, y, s):
    F = a + a.T
    g1, v1 = pointwise_split_sym2(F, y)
    g2, v2 = pointwise_split_sym2(F, s * y)
    assert np.allclose(g1, g2, atol=1e-12 * max(np.abs(F).max(), 1e-300))
    assert v2 == pytest.approx(v1 / s ** 2, rel=1e-12, abs=1e-300)


def test_decompose_sym2_hessian(grid):
    v0 = GaussPoly.gaussian((0.1, 0.2), 1.0)
    f = gen_hessian_field(grid, v0)
    sp = decompose_sym2(f)
    vv = v0.on(grid)
    err = np.abs((sp.v.data[0] - sp.v.data[0].mean()) - (vv - vv.mean())).max() / np.abs(vv).max()
    assert err <= 1e-8
    assert sp.g.max_abs() <= 1e-8 * f.max_abs()


def test_decompose_sym2_zero(grid):
    sp = decompose_sym2(GridField.zeros(grid, "sym2"))
    assert not sp.g.data.any() and not sp.v.data.any()


@pytest.mark.parametrize("seed", [1, 2, 3])
def test_decompose_sym2_random(grid, seed):
    f = gen_random_bandlimited(grid, "sym2", seed)
    sp = decompose_sym2(f)
    assert sp.residuals["reconstruction"] <= 1e-10
    assert sp.residuals["delta2_g"] <= 1e-10
    again = decompose_sym2(sp.g)
    assert again.v.max_abs() <= 1e-9 * f.max_abs()
    assert np.abs(again.g.data - sp.g.data).max() <= 1e-9 * f.max_abs()


def test_decompose_linear(grid):
    f1 = gen_random_bandlimited(grid, "sym2", 4)
    f2 = gen_random_bandlimited(grid, "sym2", 5)
    a, b, c = decompose_sym2(f1), decompose_sym2(f2), decompose_sym2(f1 * 2.0 + f2 * -0.5)
    assert np.abs(c.g.data - (2 * a.g.data - 0.5 * b.g.data)).max() <= 1e-10
    assert np.abs(c.v.data - (2 * a.v.data - 0.5 * b.v.data)).max() <= 1e-10


def test_mean_gate(grid):
    f = gen_gaussian(grid, "sym2", weights=[1, 0, 0])
    with pytest.raises(MeanZeroError) as err:
        decompose_sym2(f)
    assert err.value.means[0] == pytest.approx(np.pi)
    with pytest.raises(MeanZeroError):
        decompose_elastic(gen_gaussian(grid, "elastic2"))


def test_probe_nonzero_mean(grid):
    pr = mean_zero_necessity_probe(gen_gaussian(grid, "sym2", weights=[1, 0, 0]))
    assert pr.coefficients[0] == pytest.approx(0.5, rel=0.1)
    assert pr.expected[0] == pytest.approx(0.5, rel=1e-9)
    pr = mean_zero_necessity_probe(gen_gaussian(grid, "sym2", weights=[0, 1, 0]))
    assert pr.coefficients[0] <= 1e-6
    f12 = np.pi / (2 * np.pi)
    assert pr.coefficients[2] == pytest.approx(f12, rel=0.1)


def test_probe_mean_zero(grid):
    hat = mexican_hat()
    f = gen_sym2(grid, (hat, hat * 0.3, hat * -0.8))
    assert mean_zero_necessity_probe(f).coefficients.max() <= 1e-6


@pytest.mark.parametrize("seed", [1, 2])
def test_decompose_elastic_random(grid, seed):
    f = gen_random_bandlimited(grid, "elastic2", seed)
    es = decompose_elastic(f)
    assert max(es.residuals.values()) <= 1e-9
    again = decompose_elastic(es.g)
    assert again.v.max_abs() <= 1e-9 * f.max_abs()
    assert again.u.max_abs() <= 1e-9 * f.max_abs()


def test_decompose_elastic_potential(grid):
    f, V0, U0 = elastic_potential_fixture(grid)
    es = decompose_elastic(f)
    assert np.abs(es.v.data - V0.data).max() <= 1e-7 * V0.max_abs()
    assert np.abs(es.u.data - U0.data).max() <= 1e-7 * U0.max_abs()
    assert es.g.max_abs() <= 1e-7 * f.max_abs()


def test_decompose_elastic_zero(grid):
    es = decompose_elastic(GridField.zeros(grid, "elastic2"))
    assert not (es.v.data.any() or es.u.data.any() or es.g.data.any())


def test_wrong_kind(grid):
    with pytest.raises(ValueError):
        decompose_sym2(GridField.zeros(grid, "vector"))
    with pytest.raises(ValueError):
        decompose_elastic(GridField.zeros(grid, "sym2"))
