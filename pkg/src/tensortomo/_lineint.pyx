# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled line-integral kernel (see ``_lineint_py`` for the reference)."""
import numpy as np
cimport numpy as cnp
from libc.math cimport floor, fabs

cnp.import_array()


cdef inline double _pos5(double s) noexcept nogil:
    cdef double s2
    if s <= 0.0:
        return 0.0
    s2 = s * s
    return s2 * s2 * s


cdef inline double _bspline(double x, int order) noexcept nogil:
    cdef double ax = fabs(x)
    if order == 3:
        if ax < 1.0:
            return 2.0 / 3.0 - ax * ax + 0.5 * ax * ax * ax
        if ax < 2.0:
            return (2.0 - ax) * (2.0 - ax) * (2.0 - ax) / 6.0
        return 0.0
    return (_pos5(3.0 - ax) - 6.0 * _pos5(2.0 - ax) + 15.0 * _pos5(1.0 - ax)) / 120.0


def line_integrals(coef, double extent, double h, base, dirs, weights, int q,
                   tau, nsteps, int order, double cutoff):
    if order != 3 and order != 5:
        raise ValueError(f"unsupported spline order {order}")
    cdef const double[:, :, ::1] c = np.ascontiguousarray(coef, dtype=np.float64)
    cdef const double[:, ::1] bs = np.ascontiguousarray(base, dtype=np.float64)
    cdef const double[:, ::1] ds = np.ascontiguousarray(dirs, dtype=np.float64)
    cdef const double[:, ::1] W = np.ascontiguousarray(weights, dtype=np.float64)
    cdef const double[::1] tv = np.ascontiguousarray(tau, dtype=np.float64)
    cdef const long long[::1] ns = np.ascontiguousarray(nsteps, dtype=np.int64)
    cdef Py_ssize_t P = bs.shape[0]
    cdef Py_ssize_t C = c.shape[0]
    cdef Py_ssize_t n = c.shape[2]
    out_arr = np.zeros(P, dtype=np.float64)
    cdef double[::1] out = out_arr

    cdef Py_ssize_t p, cc, ia, ib
    cdef long long k, K, ja0, jb0, ja, jb
    cdef int lo = -(order // 2)
    cdef int ntap = order + 1
    cdef double t, p1, p2, ua, ub, val, acc, tq, trap, wab, comp
    cdef double wa[6]
    cdef double wb[6]
    cdef long long jas[6]
    cdef long long jbs[6]
    cdef int qq

    with nogil:
        for p in range(P):
            K = ns[p]
            acc = 0.0
            for k in range(-K, K + 1):
                t = k * tv[p]
                p1 = bs[p, 0] + t * ds[p, 0]
                p2 = bs[p, 1] + t * ds[p, 1]
                if p1 < -extent or p1 >= extent or p2 < -extent or p2 >= extent:
                    continue
                ua = (p1 + extent) / h
                ub = (p2 + extent) / h
                ja0 = <long long> floor(ua)
                jb0 = <long long> floor(ub)
                for ia in range(ntap):
                    ja = ja0 + lo + ia
                    wa[ia] = _bspline(ua - ja, order)
                    jas[ia] = (ja + n) % n
                    jb = jb0 + lo + ia
                    wb[ia] = _bspline(ub - jb, order)
                    jbs[ia] = (jb + n) % n
                val = 0.0
                for ib in range(ntap):
                    for ia in range(ntap):
                        wab = wb[ib] * wa[ia]
                        comp = 0.0
                        for cc in range(C):
                            comp = comp + W[p, cc] * c[cc, jbs[ib], jas[ia]]
                        val = val + wab * comp
                if fabs(val) < cutoff:
                    continue
                trap = 0.5 if (k == K or k == -K) else 1.0
                tq = 1.0
                for qq in range(q):
                    tq = tq * t
                acc = acc + trap * tq * val
            out[p] = tv[p] * acc
    return out_arr
