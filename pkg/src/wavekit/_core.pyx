# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled hot kernels.

Two loops dominate the runtime of the package: the power series of J_nu
evaluated in double-double arithmetic, and the trigonometric sums that realise
the Poisson and Bessel integrals for large arguments.  ``_purepy`` holds numpy versions with
the same signatures and results.
"""
import numpy as np
cimport numpy as cnp
from libc.math cimport cos, fabs, fma, pow, sin

cnp.import_array()


cdef inline void _two_sum(double a, double b, double* s, double* e) noexcept nogil:
    cdef double bb
    s[0] = a + b
    bb = s[0] - a
    e[0] = (a - (s[0] - bb)) + (b - bb)


cdef inline void _quick_two_sum(double a, double b, double* s, double* e) noexcept nogil:
    s[0] = a + b
    e[0] = b - (s[0] - a)


cdef inline void _dd_mul(double ah, double al, double bh, double bl,
                         double* rh, double* rl) noexcept nogil:
    cdef double p = ah * bh
    cdef double e = fma(ah, bh, -p)
    e += ah * bl + al * bh
    _quick_two_sum(p, e, rh, rl)


cdef inline void _dd_div_d(double ah, double al, double b,
                           double* rh, double* rl) noexcept nogil:
    cdef double q1 = ah / b
    cdef double p = q1 * b
    cdef double e = fma(q1, b, -p)
    cdef double s, f, q2
    _two_sum(ah, -p, &s, &f)
    f -= e
    f += al
    q2 = (s + f) / b
    _quick_two_sum(q1, q2, rh, rl)


cdef inline void _dd_add(double ah, double al, double bh, double bl,
                         double* rh, double* rl) noexcept nogil:
    cdef double s, e, t, f
    _two_sum(ah, bh, &s, &e)
    _two_sum(al, bl, &t, &f)
    e += t
    _quick_two_sum(s, e, &s, &e)
    e += f
    _quick_two_sum(s, e, rh, rl)


def series_dd(int twice_nu, const double[::1] x, double prefactor_gamma,
              double tail_tolerance, int max_terms):
    """Sum the J_nu power series for every x in double-double.

    ``prefactor_gamma`` is Gamma(nu + 1).  Returns ``(values, terms_used)``;
    ``terms_used[i] == -1`` flags a sum that did not meet the tail test.
    """
    cdef Py_ssize_t i, n = x.shape[0]
    cdef int k, m = twice_nu
    cdef double xi, yh, yl, th, tl, sh, sl, denom, a, tmax, floor_
    cdef double nu = 0.5 * m
    out_arr = np.empty(n, dtype=np.float64)
    used_arr = np.empty(n, dtype=np.int64)
    cdef double[::1] out = out_arr
    cdef long long[::1] used = used_arr
    with nogil:
        for i in range(n):
            xi = x[i]
            # -x^2/2 is exact in double-double
            yh = -xi * xi
            yl = -fma(xi, xi, yh)
            yh *= 0.5
            yl *= 0.5
            th = 1.0
            tl = 0.0
            sh = 1.0
            sl = 0.0
            tmax = 1.0
            used[i] = -1
            if xi == 0.0:
                used[i] = 0
            else:
                for k in range(1, max_terms + 1):
                    denom = <double>k * <double>(2 * k + m)
                    _dd_mul(th, tl, yh, yl, &th, &tl)
                    _dd_div_d(th, tl, denom, &th, &tl)
                    _dd_add(sh, sl, th, tl, &sh, &sl)
                    a = fabs(th)
                    if a > tmax:
                        tmax = a
                    floor_ = tmax * 1e-32
                    if fabs(sh) > floor_:
                        floor_ = fabs(sh)
                    if denom > -yh and a < tail_tolerance * floor_:
                        used[i] = k
                        break
            if m == 0:
                out[i] = (sh + sl) / prefactor_gamma
            else:
                out[i] = (sh + sl) * pow(0.5 * xi, nu) / prefactor_gamma
    return out_arr, used_arr


def cos_sum(const double[::1] x, const double[::1] s, const double[::1] w):
    """out[i] = sum_j w[j] * cos(x[i] * s[j])."""
    cdef Py_ssize_t i, j, n = x.shape[0], m = s.shape[0]
    cdef double acc, xi
    out_arr = np.empty(n, dtype=np.float64)
    cdef double[::1] out = out_arr
    with nogil:
        for i in range(n):
            xi = x[i]
            acc = 0.0
            for j in range(m):
                acc += w[j] * cos(xi * s[j])
            out[i] = acc
    return out_arr


def sin_sum(const double[::1] x, const double[::1] s, const double[::1] w):
    """out[i] = sum_j w[j] * sin(x[i] * s[j])."""
    cdef Py_ssize_t i, j, n = x.shape[0], m = s.shape[0]
    cdef double acc, xi
    out_arr = np.empty(n, dtype=np.float64)
    cdef double[::1] out = out_arr
    with nogil:
        for i in range(n):
            xi = x[i]
            acc = 0.0
            for j in range(m):
                acc += w[j] * sin(xi * s[j])
            out[i] = acc
    return out_arr
