# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels.  Mirror of ``pure.py``; keep the arithmetic identical."""

import numpy as np

from libc.math cimport acosh, cosh, exp, fabs, log, sqrt, M_PI

cdef double _EULER = 0.5772156649015328606
cdef double _SLOPE_TOL = 1e-12

cdef double[24] _GL24_X = [
    -0.9951872199970213, -0.9747285559713095, -0.9382745520027328,
    -0.886415527004401, -0.820001985973903, -0.7401241915785544,
    -0.6480936519369755, -0.5454214713888396, -0.4337935076260451,
    -0.3150426796961634, -0.1911188674736163, -0.06405689286260563,
    0.06405689286260563, 0.1911188674736163, 0.3150426796961634,
    0.4337935076260451, 0.5454214713888396, 0.6480936519369755,
    0.7401241915785544, 0.820001985973903, 0.886415527004401,
    0.9382745520027328, 0.9747285559713095, 0.9951872199970213,
]
cdef double[24] _GL24_W = [
    0.012341229799987091, 0.028531388628933743, 0.04427743881741955,
    0.05929858491543674, 0.07334648141108041, 0.08619016153195329,
    0.09761865210411406, 0.1074442701159656, 0.11550566805372561,
    0.12167047292780342, 0.1258374563468283, 0.12793819534675221,
    0.12793819534675221, 0.1258374563468283, 0.12167047292780342,
    0.11550566805372561, 0.1074442701159656, 0.09761865210411406,
    0.08619016153195329, 0.07334648141108041, 0.05929858491543674,
    0.04427743881741955, 0.028531388628933743, 0.012341229799987091,
]


# ---------------------------------------------------------------------------
# Modified Bessel functions K0, K1
# ---------------------------------------------------------------------------

cdef void _k_small(double z, double* out0, double* out1) noexcept:
    cdef double q = 0.25 * z * z
    cdef double lg = log(0.5 * z)
    cdef double t0 = 1.0
    cdef double t1 = 1.0
    cdef double i0 = 1.0
    cdef double i1s = 1.0
    cdef double s0 = 0.0
    cdef double s1 = 1.0
    cdef double hk = 0.0
    cdef double hk1
    cdef long k = 0
    while True:
        k += 1
        t0 *= q / (k * k)
        t1 *= q / (k * (k + 1))
        hk += 1.0 / k
        hk1 = hk + 1.0 / (k + 1)
        i0 += t0
        i1s += t1
        s0 += t0 * hk
        s1 += t1 * (hk + hk1)
        if t0 < 1e-18 * i0 and k > 3:
            break
    out0[0] = -(lg + _EULER) * i0 + s0
    out1[0] = lg * (0.5 * z * i1s) + 1.0 / z - 0.25 * z * (s1 - 2.0 * _EULER * i1s)


cdef void _k_mid(double z, double* out0, double* out1) noexcept:
    cdef double big_t = acosh(52.0 / z)
    cdef double s0 = 0.0
    cdef double s1 = 0.0
    cdef double a, b, h, c, t, ch, e
    cdef int p, i
    for p in range(4):
        a = big_t * p / 4.0
        b = big_t * (p + 1) / 4.0
        h = 0.5 * (b - a)
        c = 0.5 * (a + b)
        for i in range(24):
            t = c + h * _GL24_X[i]
            ch = cosh(t)
            e = exp(-z * ch) * _GL24_W[i] * h
            s0 += e
            s1 += e * ch
    out0[0] = s0
    out1[0] = s1


cdef double _k_asym_sum(double mu, double z) noexcept:
    cdef double s = 1.0
    cdef double t = 1.0
    cdef double tn
    cdef long k = 0
    while True:
        tn = t * (mu - (2 * k + 1) * (2 * k + 1)) / (8.0 * (k + 1) * z)
        if fabs(tn) >= fabs(t) or fabs(tn) < 1e-19 * fabs(s):
            if fabs(tn) < fabs(t):
                s += tn
            break
        s += tn
        t = tn
        k += 1
        if k > 200:
            break
    return s


cdef void _k_pair(double z, double* out0, double* out1) noexcept:
    cdef double pref
    if z > 700.0:
        out0[0] = 0.0
        out1[0] = 0.0
        return
    if z < 1.5:
        _k_small(z, out0, out1)
        return
    if z <= 11.0:
        _k_mid(z, out0, out1)
        return
    pref = sqrt(M_PI / (2.0 * z)) * exp(-z)
    out0[0] = pref * _k_asym_sum(0.0, z)
    out1[0] = pref * _k_asym_sum(4.0, z)


def bessel_k0(double z):
    cdef double a, b
    _k_pair(z, &a, &b)
    return a


def bessel_k1(double z):
    cdef double a, b
    _k_pair(z, &a, &b)
    return b


def bessel_k0k1(double z):
    cdef double a, b
    _k_pair(z, &a, &b)
    return a, b


# ---------------------------------------------------------------------------
# Theta series for the excursion maximum
# ---------------------------------------------------------------------------

cdef double _f3_cdf(double y, double cutoff, double abs_tol, long max_terms) noexcept:
    cdef double half_tol, s, a, e, term, v
    cdef long n
    if y <= cutoff:
        return 0.0
    half_tol = 0.5 * abs_tol
    s = 0.0
    n = 0
    while n < max_terms:
        n += 1
        a = n * y
        e = 2.0 * a * a
        term = (2.0 * e - 1.0) * exp(-e)
        s += term
        if a >= 2.0 and fabs(term) < half_tol:
            break
    v = 1.0 - 2.0 * s
    # below 1e-13 the cancellation noise of the O(1) terms swamps any true
    # value; snap to 0 so sampled grids stay monotone through that band
    if v < 1e-13:
        return 0.0
    if v > 1.0:
        return 1.0
    return v


cdef double _f3_pdf(double y, double cutoff, double abs_tol, long max_terms) noexcept:
    cdef double half_tol, s, a, e, term
    cdef long n
    if y <= cutoff:
        return 0.0
    half_tol = 0.5 * abs_tol
    s = 0.0
    n = 0
    while n < max_terms:
        n += 1
        a = n * y
        e = 2.0 * a * a
        term = 8.0 * n * a * (2.0 * e - 3.0) * exp(-e)
        s += term
        if a >= 2.0 and fabs(term) < half_tol:
            break
    if s < 0.0:
        return 0.0
    return s


cdef double _f3_quantile(double p, double cutoff, double abs_tol, long max_terms) noexcept:
    cdef double lo = cutoff
    cdef double hi = 10.0
    cdef double mid, y, f, d, yn
    cdef int it
    while hi - lo > 1e-6:
        mid = 0.5 * (lo + hi)
        if _f3_cdf(mid, cutoff, abs_tol, max_terms) < p:
            lo = mid
        else:
            hi = mid
    y = 0.5 * (lo + hi)
    for it in range(30):
        f = _f3_cdf(y, cutoff, abs_tol, max_terms) - p
        if fabs(f) <= 1e-13:
            break
        if f < 0.0:
            lo = y
        else:
            hi = y
        d = _f3_pdf(y, cutoff, abs_tol, max_terms)
        if d > 0.0:
            yn = y - f / d
        else:
            yn = 0.5 * (lo + hi)
        if yn <= lo or yn >= hi:
            yn = 0.5 * (lo + hi)
        y = yn
    return y


def f3_cdf(double y, double cutoff, double abs_tol, long max_terms):
    return _f3_cdf(y, cutoff, abs_tol, max_terms)


def f3_pdf(double y, double cutoff, double abs_tol, long max_terms):
    return _f3_pdf(y, cutoff, abs_tol, max_terms)


def f3_quantile(double p, double cutoff, double abs_tol, long max_terms):
    return _f3_quantile(p, cutoff, abs_tol, max_terms)


# ---------------------------------------------------------------------------
# Sampler core
# ---------------------------------------------------------------------------

def sample_m_block(u, double tail_guard, double residual_eps,
                   double cutoff, double abs_tol, long max_terms):
    cdef double[:, ::1] uv = np.ascontiguousarray(u, dtype=np.float64)
    cdef Py_ssize_t m = uv.shape[0]
    cdef Py_ssize_t max_sticks = uv.shape[1] // 2
    out_arr = np.empty(m, dtype=np.float64)
    cdef double[::1] out = out_arr
    cdef Py_ssize_t r, j
    cdef double residual, best, w, uu, length, p, m3, cand
    for r in range(m):
        residual = 1.0
        best = 0.0
        for j in range(max_sticks):
            w = uv[r, 2 * j]
            uu = uv[r, 2 * j + 1]
            length = residual * w
            residual = residual * (1.0 - w)
            p = uu if uu > 0.0 else 1e-300
            m3 = _f3_quantile(p, cutoff, abs_tol, max_terms)
            cand = sqrt(length) * m3
            if cand > best:
                best = cand
            if residual < residual_eps:
                break
            if sqrt(residual) * tail_guard < best:
                break
        out[r] = best
    return out_arr


# ---------------------------------------------------------------------------
# Upper concave hull
# ---------------------------------------------------------------------------

def upper_hull(values):
    cdef double[::1] v = np.ascontiguousarray(values, dtype=np.float64)
    cdef Py_ssize_t n1 = v.shape[0]
    stack_arr = np.empty(n1, dtype=np.int64)
    cdef long long[::1] stack = stack_arr
    cdef Py_ssize_t top = 0
    cdef Py_ssize_t i
    cdef long long a, b
    cdef double vi, s1, s2, m
    stack[0] = 0
    for i in range(1, n1):
        vi = v[i]
        while top >= 1:
            a = stack[top - 1]
            b = stack[top]
            s1 = (v[b] - v[a]) / (b - a)
            s2 = (vi - v[b]) / (i - b)
            m = fabs(s1)
            if fabs(s2) > m:
                m = fabs(s2)
            if s1 - s2 <= _SLOPE_TOL * m:
                top -= 1
            else:
                break
        top += 1
        stack[top] = i
    return stack_arr[: top + 1].copy()
