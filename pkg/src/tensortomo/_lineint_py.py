"""NumPy implementation of the line-integral kernel.

Used when the compiled extension is unavailable (or when
``TENSORTOMO_PURE_PYTHON=1``).  Must match ``_lineint.pyx`` to rounding.
"""
import numpy as np

CHUNK = 64


def bspline(x, order):
    """Centered cardinal B-spline of degree 3 or 5."""
    ax = np.abs(x)
    if order == 3:
        out = np.where(ax < 1.0, 2.0 / 3.0 - ax ** 2 + 0.5 * ax ** 3, 0.0)
        return np.where((ax >= 1.0) & (ax < 2.0), (2.0 - ax) ** 3 / 6.0, out)
    if order == 5:
        p = lambda s: np.where(s > 0, s, 0.0) ** 5
        return (p(3.0 - ax) - 6.0 * p(2.0 - ax) + 15.0 * p(1.0 - ax)) / 120.0
    raise ValueError(f"unsupported spline order {order}")


def _taps(u, order):
    j0 = np.floor(u).astype(np.int64)
    lo = -(order // 2)
    offs = np.arange(lo, lo + order + 1)
    j = j0[..., None] + offs
    return j, bspline(u[..., None] - j, order)


def line_integrals(coef, extent, h, base, dirs, weights, q, tau, nsteps, order, cutoff):
    """``sum_k w_k t_k^q sum_c weights[p, c] f_c(base_p + t_k dirs_p)`` per line.

    ``t_k = k * tau[p]`` for ``|k| <= nsteps[p]`` with trapezoid end weights.
    Samples outside ``[-extent, extent)^2`` count as zero and samples whose
    magnitude is below ``cutoff`` are dropped.
    """
    coef = np.ascontiguousarray(coef, dtype=np.float64)
    n = coef.shape[-1]
    base = np.asarray(base, float)
    dirs = np.asarray(dirs, float)
    weights = np.asarray(weights, float)
    tau = np.asarray(tau, float)
    nsteps = np.asarray(nsteps, np.int64)
    P = base.shape[0]
    out = np.zeros(P)
    for s in range(0, P, CHUNK):
        e = min(P, s + CHUNK)
        K = int(nsteps[s:e].max()) if e > s else 0
        k = np.arange(-K, K + 1)
        t = tau[s:e, None] * k[None, :]
        trap = np.where(np.abs(k)[None, :] == nsteps[s:e, None], 0.5, 1.0)
        trap = np.where(np.abs(k)[None, :] > nsteps[s:e, None], 0.0, trap)
        p1 = base[s:e, 0, None] + t * dirs[s:e, 0, None]
        p2 = base[s:e, 1, None] + t * dirs[s:e, 1, None]
        inside = (p1 >= -extent) & (p1 < extent) & (p2 >= -extent) & (p2 < extent)
        ua = np.where(inside, (p1 + extent) / h, 0.0)
        ub = np.where(inside, (p2 + extent) / h, 0.0)
        ja, wa = _taps(ua, order)
        jb, wb = _taps(ub, order)
        ja %= n
        jb %= n
        # contract components first: field[p, b, a] = sum_c weights[p, c] coef[c, b, a]
        val = np.zeros(t.shape)
        W = weights[s:e]
        for ob in range(order + 1):
            for oa in range(order + 1):
                g = coef[:, jb[..., ob], ja[..., oa]]  # (C, lines, samples)
                val += wb[..., ob] * wa[..., oa] * np.einsum("pc,cpk->pk", W, g)
        val = np.where(inside & (np.abs(val) >= cutoff), val, 0.0)
        tq = t ** q if q else 1.0
        out[s:e] = tau[s:e] * np.sum(trap * tq * val, axis=1)
    return out
