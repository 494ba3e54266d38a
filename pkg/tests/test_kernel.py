import os
import subprocess
import sys

import numpy as np
import pytest
from scipy import ndimage

from tensortomo import _lineint_py
from tensortomo import raytransforms as rt
from tensortomo.grid import Grid2, gen_random_bandlimited
from tensortomo.verify import gaussian_sym2

try:
    from tensortomo import _lineint
except ImportError:  # extension not built
    _lineint = None

needs_ext = pytest.mark.skipif(_lineint is None, reason="compiled kernel not built")


def _args(seed=0, order=5, q=1, cutoff=1e-14):
    g = Grid2(64, 6.0)
    f = gaussian_sym2(g)
    sf = rt.SplineField(f, order)
    rng = np.random.default_rng(seed)
    P = 50
    phi = rng.uniform(0, 2 * np.pi, P)
    dirs = rng.uniform(0.5, 2, P)[:, None] * np.stack([np.cos(phi), np.sin(phi)], 1)
    base = rng.uniform(-3, 3, (P, 2))
    w = rng.standard_normal((P, 3))
    tau = g.h / 2 / np.linalg.norm(dirs, axis=1)
    ns = rng.integers(0, 200, P)
    return sf.coef, 6.0, g.h, base, dirs, w, q, tau, ns, order, cutoff * sf.field.max_abs()


@needs_ext
@pytest.mark.parametrize("order", [3, 5])
@pytest.mark.parametrize("q", [0, 1, 2])
def test_compiled_matches_fallback(order, q):
    args = _args(order=order, q=q)
    a = _lineint_py.line_integrals(*args)
    b = _lineint.line_integrals(*args)
    assert np.abs(a - b).max() <= 1e-13 * max(np.abs(a).max(), 1)


@needs_ext
def test_compiled_rejects_order():
    args = list(_args())
    args[9] = 4
    with pytest.raises(ValueError):
        _lineint.line_integrals(*args)


def test_fallback_rejects_order():
    with pytest.raises(ValueError):
        _lineint_py.bspline(np.zeros(3), 4)


@pytest.mark.parametrize("order", [3, 5])
def test_bspline_partition_of_unity(order):
    u = np.linspace(0, 1, 11)
    j, w = _lineint_py._taps(u, order)
    assert np.allclose(w.sum(axis=-1), 1.0, atol=1e-14)


@pytest.mark.parametrize("order", [3, 5])
def test_interpolation_matches_scipy(order):
    g = Grid2(64, 6.0)
    f = gen_random_bandlimited(g, "vector", 3, cutoff=0.4)
    sf = rt.SplineField(f, order)
    rng = np.random.default_rng(1)
    pts = rng.uniform(-5.5, 5.5, (40, 2))
    ours = sf(pts)
    ua = (pts[:, 0] + g.extent) / g.h
    ub = (pts[:, 1] + g.extent) / g.h
    for c in range(2):
        ref = ndimage.map_coordinates(f.data[c], [ub, ua], order=order, mode="grid-wrap")
        assert np.abs(ours[c] - ref).max() <= 1e-12


def test_interpolant_reproduces_nodes():
    g = Grid2(32, 3.0)
    f = gen_random_bandlimited(g, "scalar", 9, cutoff=0.5)
    sf = rt.SplineField(f)
    X1, X2 = g.mesh()
    pts = np.stack([X1.ravel(), X2.ravel()], 1)
    assert np.abs(sf(pts)[0] - f.data[0].ravel()).max() <= 1e-12


def test_pure_python_switch():
    env = dict(os.environ, TENSORTOMO_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", "import tensortomo; print(tensortomo.KERNEL_BACKEND)"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"


def test_backend_choice_is_reported():
    assert rt.KERNEL_BACKEND == ("cython" if _lineint is not None and
                                 os.environ.get("TENSORTOMO_PURE_PYTHON") != "1" else "python")
