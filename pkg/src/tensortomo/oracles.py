"""Independent reference computations used by tests and verification suites.

Nothing here shares code paths with the closed-form splits: the elastic
split is a dense least-squares solve in an explicit basis and the
symmetrizations loop over permutations.
"""
from __future__ import annotations

import itertools
import math

import numpy as np

from .decompose import hat_H, hat_Hstar, hat_K, hat_Kstar


def brute_symmetrize(t):
    """Average of ``t`` over all permutations of its indices."""
    t = np.asarray(t)
    perms = list(itertools.permutations(range(t.ndim)))
    return sum(np.transpose(t, p) for p in perms) / len(perms)


def brute_eps(t):
    """Average over the 8 index maps generated by (ij)-, (kl)- and pair swaps."""
    t = np.asarray(t)
    maps = []
    for a, b in itertools.product([(0, 1), (1, 0)], repeat=2):
        maps.append(a + tuple(2 + x for x in b))
        maps.append(tuple(2 + x for x in b) + a)
    return sum(np.transpose(t, m) for m in maps) / len(maps)


def _elastic_basis():
    """Orthonormal basis (w.r.t. full contraction) of E^2(R^2) as 6 full arrays."""
    raw = []
    for idx in itertools.product(range(2), repeat=4):
        e = np.zeros((2,) * 4)
        e[idx] = 1.0
        raw.append(brute_eps(e).ravel())
    u, s, _ = np.linalg.svd(np.array(raw).T, full_matrices=False)
    return u[:, s > 1e-10].T.reshape(-1, 2, 2, 2, 2)


E2_BASIS = _elastic_basis()
SYM2_BASIS = [np.array([[1.0, 0.0], [0.0, 0.0]]), np.array([[0.0, 1.0], [1.0, 0.0]]),
              np.array([[0.0, 0.0], [0.0, 1.0]])]


def lstsq_split_elastic(F, y):
    """Split ``F`` into ``H_y v + K_y u + g`` by solving a dense 16 x 6 system.

    Columns: ``H_y e_a`` for the three sym2 basis tensors, ``K_y y_perp``,
    and a basis of the joint null space of ``H*_y`` and ``K*_y`` in E^2.
    """
    y = np.asarray(y, float)
    yp = np.array([-y[1], y[0]])
    A = [hat_H(y, e) for e in SYM2_BASIS]
    B = [hat_K(y, yp)]
    # constraint map E^2 -> R^3 x R^2 in basis coordinates
    M = np.array([np.concatenate([hat_Hstar(y, e)[np.triu_indices(2)], hat_Kstar(y, e)]) for e in E2_BASIS]).T
    _, s, vt = np.linalg.svd(M)
    null = vt[np.sum(s > 1e-12 * s.max()):]
    C = [np.tensordot(c, E2_BASIS, axes=1) for c in null]
    cols = np.array([c.ravel() for c in A + B + C]).T
    F = np.asarray(F)
    coef = np.linalg.lstsq(cols.astype(F.dtype), F.ravel(), rcond=None)[0]
    V = sum(c * e for c, e in zip(coef[:3], SYM2_BASIS))
    U = coef[3] * yp
    G = sum(c * e for c, e in zip(coef[4:], C))
    return V, U, G


def gaussian_line_integral(q, offset=0.0):
    """``int (t + offset)^q exp(-t^2) dt`` for q = 0, 1, 2."""
    sp = math.sqrt(math.pi)
    return [sp, offset * sp, (0.5 + offset ** 2) * sp][q]


def gaussian_hat(y):
    """Transform of ``exp(-|x|^2)`` in the symmetric 2-D convention."""
    y = np.asarray(y, float)
    return 0.5 * np.exp(-np.sum(y * y, axis=0) / 4)
