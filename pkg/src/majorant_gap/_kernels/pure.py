"""Pure-Python reference kernels.

Every function here has a compiled twin in ``_core.pyx``.  The two
implementations share the exact same arithmetic, written in the same order,
so that results agree bit for bit and the backend choice never changes any
number downstream.  Keep edits synchronized.
"""

import math

import numpy as np

_EULER = 0.5772156649015328606
_SLOPE_TOL = 1e-12  # relative collinearity tolerance for the hull scan


# ---------------------------------------------------------------------------
# Modified Bessel functions K0, K1
# ---------------------------------------------------------------------------

# 24-node Gauss-Legendre rule, embedded as literals so the compiled twin can
# carry the identical constants
_GL24_X = (
    -0.9951872199970213, -0.9747285559713095, -0.9382745520027328,
    -0.886415527004401, -0.820001985973903, -0.7401241915785544,
    -0.6480936519369755, -0.5454214713888396, -0.4337935076260451,
    -0.3150426796961634, -0.1911188674736163, -0.06405689286260563,
    0.06405689286260563, 0.1911188674736163, 0.3150426796961634,
    0.4337935076260451, 0.5454214713888396, 0.6480936519369755,
    0.7401241915785544, 0.820001985973903, 0.886415527004401,
    0.9382745520027328, 0.9747285559713095, 0.9951872199970213,
)
_GL24_W = (
    0.012341229799987091, 0.028531388628933743, 0.04427743881741955,
    0.05929858491543674, 0.07334648141108041, 0.08619016153195329,
    0.09761865210411406, 0.1074442701159656, 0.11550566805372561,
    0.12167047292780342, 0.1258374563468283, 0.12793819534675221,
    0.12793819534675221, 0.1258374563468283, 0.12167047292780342,
    0.11550566805372561, 0.1074442701159656, 0.09761865210411406,
    0.08619016153195329, 0.07334648141108041, 0.05929858491543674,
    0.04427743881741955, 0.028531388628933743, 0.012341229799987091,
)


def _k_small(z: float) -> tuple[float, float]:
    """Ascending series with log term, used for 0 < z < 1.5."""
    q = 0.25 * z * z
    lg = math.log(0.5 * z)
    t0 = 1.0          # q^k / (k!)^2
    t1 = 1.0          # q^k / (k! (k+1)!)
    i0 = 1.0
    i1s = 1.0
    s0 = 0.0          # sum H_k q^k / (k!)^2
    s1 = 1.0          # sum (H_k + H_{k+1}) q^k / (k! (k+1)!), k=0 term is 1
    hk = 0.0
    k = 0
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
    k0 = -(lg + _EULER) * i0 + s0
    k1 = lg * (0.5 * z * i1s) + 1.0 / z - 0.25 * z * (s1 - 2.0 * _EULER * i1s)
    return k0, k1


def _k_mid(z: float) -> tuple[float, float]:
    """Integral representation K_nu(z) = int exp(-z cosh t) cosh(nu t) dt,
    used for 1.5 <= z <= 11 where both series forms lose absolute accuracy
    (the ascending one to e^z cancellation, the asymptotic one to its
    optimal-truncation floor ~e^(-2z)).

    Four fixed Gauss-Legendre panels on [0, T] with z cosh T = 52, so the
    discarded tail is below e^(-52); measured absolute error ~2e-16.
    """
    big_t = math.acosh(52.0 / z)
    s0 = 0.0
    s1 = 0.0
    for p in range(4):
        a = big_t * p / 4.0
        b = big_t * (p + 1) / 4.0
        h = 0.5 * (b - a)
        c = 0.5 * (a + b)
        for i in range(24):
            t = c + h * _GL24_X[i]
            ch = math.cosh(t)
            e = math.exp(-z * ch) * _GL24_W[i] * h
            s0 += e
            s1 += e * ch
    return s0, s1


def _k_asym_sum(mu: float, z: float) -> float:
    # Divergent asymptotic series, truncated at its smallest term.
    s = 1.0
    t = 1.0
    k = 0
    while True:
        tn = t * (mu - (2 * k + 1) * (2 * k + 1)) / (8.0 * (k + 1) * z)
        if abs(tn) >= abs(t) or abs(tn) < 1e-19 * abs(s):
            if abs(tn) < abs(t):
                s += tn
            break
        s += tn
        t = tn
        k += 1
        if k > 200:
            break
    return s


def _k_large(z: float) -> tuple[float, float]:
    pref = math.sqrt(math.pi / (2.0 * z)) * math.exp(-z)
    return pref * _k_asym_sum(0.0, z), pref * _k_asym_sum(4.0, z)


def bessel_k0(z: float) -> float:
    if z > 700.0:
        return 0.0
    if z < 1.5:
        return _k_small(z)[0]
    if z <= 11.0:
        return _k_mid(z)[0]
    return _k_large(z)[0]


def bessel_k1(z: float) -> float:
    if z > 700.0:
        return 0.0
    if z < 1.5:
        return _k_small(z)[1]
    if z <= 11.0:
        return _k_mid(z)[1]
    return _k_large(z)[1]


def bessel_k0k1(z: float) -> tuple[float, float]:
    """Both orders at once; the work is shared."""
    if z > 700.0:
        return 0.0, 0.0
    if z < 1.5:
        return _k_small(z)
    if z <= 11.0:
        return _k_mid(z)
    return _k_large(z)


# ---------------------------------------------------------------------------
# Theta series for the excursion maximum
# ---------------------------------------------------------------------------

def f3_cdf(y: float, cutoff: float, abs_tol: float, max_terms: int) -> float:
    if y <= cutoff:
        return 0.0
    half_tol = 0.5 * abs_tol
    s = 0.0
    n = 0
    while n < max_terms:
        n += 1
        a = n * y
        e = 2.0 * a * a
        term = (2.0 * e - 1.0) * math.exp(-e)
        s += term
        # terms change sign below a=2; only trust smallness past that point
        if a >= 2.0 and abs(term) < half_tol:
            break
    v = 1.0 - 2.0 * s
    # below 1e-13 the cancellation noise of the O(1) terms swamps any true
    # value; snap to 0 so sampled grids stay monotone through that band
    if v < 1e-13:
        return 0.0
    if v > 1.0:
        return 1.0
    return v


def f3_pdf(y: float, cutoff: float, abs_tol: float, max_terms: int) -> float:
    if y <= cutoff:
        return 0.0
    half_tol = 0.5 * abs_tol
    s = 0.0
    n = 0
    while n < max_terms:
        n += 1
        a = n * y
        e = 2.0 * a * a
        term = 8.0 * n * a * (2.0 * e - 3.0) * math.exp(-e)
        s += term
        if a >= 2.0 and abs(term) < half_tol:
            break
    if s < 0.0:
        return 0.0
    return s


def f3_quantile(p: float, cutoff: float, abs_tol: float, max_terms: int) -> float:
    lo = cutoff
    hi = 10.0
    while hi - lo > 1e-6:
        mid = 0.5 * (lo + hi)
        if f3_cdf(mid, cutoff, abs_tol, max_terms) < p:
            lo = mid
        else:
            hi = mid
    y = 0.5 * (lo + hi)
    for _ in range(30):
        f = f3_cdf(y, cutoff, abs_tol, max_terms) - p
        if abs(f) <= 1e-13:
            break
        if f < 0.0:
            lo = y
        else:
            hi = y
        d = f3_pdf(y, cutoff, abs_tol, max_terms)
        if d > 0.0:
            yn = y - f / d
        else:
            yn = 0.5 * (lo + hi)
        if yn <= lo or yn >= hi:
            yn = 0.5 * (lo + hi)
        y = yn
    return y


# ---------------------------------------------------------------------------
# Sampler core
# ---------------------------------------------------------------------------

def sample_m_block(u, tail_guard: float, residual_eps: float,
                   cutoff: float, abs_tol: float, max_terms: int):
    """One max-gap sample per row of ``u``.

    Row layout: (w_1, u_1, w_2, u_2, ...).  w_j breaks the stick, u_j feeds
    the quantile draw.  Unused tail entries of a row are simply ignored, so
    randomness consumption is identical in both backends.
    """
    u = np.ascontiguousarray(u, dtype=np.float64)
    m, width = u.shape
    max_sticks = width // 2
    out = np.empty(m, dtype=np.float64)
    rows = u.tolist()
    for r in range(m):
        row = rows[r]
        residual = 1.0
        best = 0.0
        for j in range(max_sticks):
            w = row[2 * j]
            uu = row[2 * j + 1]
            length = residual * w
            residual = residual * (1.0 - w)
            p = uu if uu > 0.0 else 1e-300
            m3 = f3_quantile(p, cutoff, abs_tol, max_terms)
            cand = math.sqrt(length) * m3
            if cand > best:
                best = cand
            if residual < residual_eps:
                break
            if math.sqrt(residual) * tail_guard < best:
                break
        out[r] = best
    return out


# ---------------------------------------------------------------------------
# Upper concave hull (least concave majorant on a uniform grid)
# ---------------------------------------------------------------------------

def upper_hull(values):
    """Indices of the hull vertices of points (i, values[i]), O(n) scan.

    Slopes are measured in grid-index units; near-collinear interior points
    (relative slope difference <= 1e-12) are merged away.
    """
    values = np.ascontiguousarray(values, dtype=np.float64)
    v = values.tolist()
    n1 = len(v)
    stack = [0] * n1
    top = 0
    for i in range(1, n1):
        vi = v[i]
        while top >= 1:
            a = stack[top - 1]
            b = stack[top]
            s1 = (v[b] - v[a]) / (b - a)
            s2 = (vi - v[b]) / (i - b)
            m = abs(s1)
            if abs(s2) > m:
                m = abs(s2)
            if s1 - s2 <= _SLOPE_TOL * m:
                top -= 1
            else:
                break
        top += 1
        stack[top] = i
    return np.array(stack[: top + 1], dtype=np.int64)
