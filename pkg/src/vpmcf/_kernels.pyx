# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled hot loops: the fused explicit update, the IMEX right-hand side and
the fused diagnostics reductions. Arrays arrive flattened (row-major, last axis
fastest). Pointwise loops run in parallel; reductions are serial so their
order is fixed."""

from cython.parallel import prange
from libc.math cimport fabs, sqrt

import numpy as np


cdef inline void _nbrs(Py_ssize_t i, Py_ssize_t n, int d,
                       Py_ssize_t* up, Py_ssize_t* dn) noexcept nogil:
    cdef Py_ssize_t stride = 1
    cdef Py_ssize_t rem = i
    cdef Py_ssize_t c
    cdef int k
    for k in range(d - 1, -1, -1):
        c = rem % n
        rem = rem // n
        if c + 1 < n:
            up[k] = i + stride
        else:
            up[k] = i + stride - n * stride
        if c > 0:
            dn[k] = i - stride
        else:
            dn[k] = i - stride + n * stride
        stride = stride * n


cdef inline double _lap(const double[::1] f, Py_ssize_t i, Py_ssize_t n, int d,
                        double h2) noexcept nogil:
    cdef Py_ssize_t up[3]
    cdef Py_ssize_t dn[3]
    cdef double acc = 0.0
    cdef int k
    _nbrs(i, n, d, up, dn)
    for k in range(d):
        acc = acc + ((f[up[k]] - 2.0 * f[i]) + f[dn[k]])
    return acc / h2


cdef inline double _react(double p, double g, double ie2, double ie) noexcept nogil:
    cdef double q = 1.0 - p * p
    return (2.0 * p * q) * ie2 + (g * fabs(q)) * ie


def laplacian(const double[::1] f, Py_ssize_t n, int d, double h, int threads=1):
    cdef Py_ssize_t i, m = f.shape[0]
    out = np.empty(m)
    cdef double[::1] o = out
    cdef double h2 = h * h
    for i in prange(m, nogil=True, num_threads=threads, schedule="static"):
        o[i] = _lap(f, i, n, d, h2)
    return out


def explicit_update(const double[::1] phi, const double[::1] a, const double[::1] b,
                    double lam, double eps, double dt, Py_ssize_t n, int d, double h,
                    int threads=1):
    cdef Py_ssize_t i, m = phi.shape[0]
    out = np.empty(m)
    cdef double[::1] o = out
    cdef double h2 = h * h
    cdef double ie2 = 1.0 / (eps * eps)
    cdef double ie = 1.0 / eps
    for i in prange(m, nogil=True, num_threads=threads, schedule="static"):
        o[i] = phi[i] + dt * (_lap(phi, i, n, d, h2) + _react(phi[i], lam * a[i] + b[i], ie2, ie))
    return out


def imex_rhs(const double[::1] phi, const double[::1] a, const double[::1] b,
             double lam, double eps, double dt, int threads=1):
    cdef Py_ssize_t i, m = phi.shape[0]
    out = np.empty(m)
    cdef double[::1] o = out
    cdef double ie2 = 1.0 / (eps * eps)
    cdef double ie = 1.0 / eps
    for i in prange(m, nogil=True, num_threads=threads, schedule="static"):
        o[i] = phi[i] + dt * _react(phi[i], lam * a[i] + b[i], ie2, ie)
    return out


def moments(const double[::1] phi, const double[::1] a, const double[::1] b,
            const double[::1] under, const double[::1] over,
            double eps, Py_ssize_t n, int d, double h):
    """Raw (unweighted) sums and maxima over the grid; see the numpy twin."""
    cdef Py_ssize_t i, m = phi.shape[0]
    cdef Py_ssize_t up[3]
    cdef Py_ssize_t dn[3]
    cdef int k
    cdef bint has_under = under.shape[0] == m
    cdef bint has_over = over.shape[0] == m
    cdef double p, q, w, gc, gf, t, kp, xi, v
    cdef double e_c = 0.0, xi_abs = 0.0, e_f = 0.0, vol_a = 0.0, bk = 0.0
    cdef double ksum = 0.0, bv = 0.0
    cdef double xi_max = -1e300, maxabs = 0.0, gmax = 0.0, vp = 0.0, vm = 0.0
    cdef Py_ssize_t npos = 0
    cdef Py_ssize_t nonfinite = 0
    cdef double inv2h = 1.0 / (2.0 * h)
    cdef double invh = 1.0 / h
    with nogil:
        for i in range(m):
            p = phi[i]
            if not fabs(p) <= 1.7976931348623157e308:
                nonfinite = nonfinite + 1
            _nbrs(i, n, d, up, dn)
            gc = 0.0
            gf = 0.0
            for k in range(d):
                t = (phi[up[k]] - phi[dn[k]]) * inv2h
                gc = gc + t * t
                t = (phi[up[k]] - p) * invh
                gf = gf + t * t
            q = 1.0 - p * p
            w = 0.5 * q * q
            kp = p - p * p * p / 3.0
            e_c = e_c + (0.5 * eps * gc + w / eps)
            xi = 0.5 * eps * gc - w / eps
            xi_abs = xi_abs + fabs(xi)
            if xi > xi_max:
                xi_max = xi
            e_f = e_f + (0.5 * eps * gf + w / eps)
            vol_a = vol_a + a[i] * kp
            bk = bk + b[i] * kp
            ksum = ksum + kp
            if p > 0.0:
                npos = npos + 1
            if fabs(p) > maxabs:
                maxabs = fabs(p)
            bv = bv + fabs(q) * sqrt(gc)
            if gc > gmax:
                gmax = gc
            if has_under:
                v = under[i] - p
                if v > vp:
                    vp = v
            if has_over:
                v = p - over[i]
                if v > vm:
                    vm = v
    return (e_c, xi_abs, xi_max, e_f, vol_a, bk, ksum, npos, maxabs, bv,
            sqrt(gmax), vp, vm, nonfinite)


def diff_sq_sum(const double[::1] x, const double[::1] y):
    cdef Py_ssize_t i, m = x.shape[0]
    cdef double acc = 0.0, t
    with nogil:
        for i in range(m):
            t = x[i] - y[i]
            acc = acc + t * t
    return acc
