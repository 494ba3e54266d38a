"""Time the compiled line-integral kernel against the NumPy fallback.

    python3 benchmarks/bench_lineint.py [--grid 128] [--angles 64] [--offsets 129] [--repeat 3]
"""
import argparse
import time

import numpy as np

from tensortomo import _lineint_py
from tensortomo import raytransforms as rt
from tensortomo.grid import Grid2
from tensortomo.verify import gaussian_sym2

try:
    from tensortomo import _lineint
except ImportError:
    _lineint = None


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--grid", type=int, default=128)
    ap.add_argument("--extent", type=float, default=6.0)
    ap.add_argument("--angles", type=int, default=64)
    ap.add_argument("--offsets", type=int, default=129)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)

    grid = Grid2(args.grid, args.extent)
    f = gaussian_sym2(grid)
    sf = rt.interpolant(f)
    lines = rt.LineGrid.for_grid(grid, args.angles, args.offsets)
    base, xi, _ = lines.rays()
    weights = rt.component_weights(f.kind, rt._contraction(xi, xi, 1))
    speed = np.linalg.norm(xi, axis=1)
    tmax = (lines.tmax + np.abs(np.einsum("pi,pi->p", base, xi)) / speed) / speed
    tau = lines.tau / speed
    nsteps = np.floor(tmax / tau + 1e-9).astype(np.int64)
    call = (sf.coef, grid.extent, grid.h, base, xi, weights, 0, tau, nsteps, sf.order, sf.cutoff)

    print(f"{len(base)} lines, {int((2 * nsteps + 1).sum())} samples, spline order {sf.order}")
    t_py, ref = best_of(lambda: _lineint_py.line_integrals(*call), args.repeat)
    print(f"numpy fallback : {t_py:8.3f} s")
    if _lineint is None:
        print("compiled kernel: not built")
        return 0
    t_c, out = best_of(lambda: _lineint.line_integrals(*call), args.repeat)
    diff = np.abs(out - ref).max() / np.abs(ref).max()
    print(f"compiled kernel: {t_c:8.3f} s  (speedup {t_py / t_c:.1f}x, max rel diff {diff:.1e})")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
