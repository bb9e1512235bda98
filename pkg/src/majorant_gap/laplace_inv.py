"""Inverse Laplace transforms and the analytic law of the maximum gap M.

Two layers live here.  ``invert`` is a generic real-axis Gaver-Stehfest
inverter for user-supplied transforms.  On top of it, ``cdf``/``pdf``/
``quantile`` expose the law of M, whose transform pair is

    F_M(x) = invL[ G(sqrt(s))/s ](1/x^2),
    f_M(x) = (2/x^3) invL[ 1 - G(sqrt(s)) ](1/x^2),

with G the Bessel-product function of module ``analytic``.

Gaver-Stehfest amplifies transform noise by ~1e10 at order 18, and its
method error in regions where F_M is within ~1e-4 of a constant decays too
slowly in the order for the monotonicity and derivative-consistency
guarantees made here (measured: order 40 at 50-digit arithmetic still shows
~1e-7 error below x = 0.45).  The distribution layer therefore refines the
raw inversion with the exact self-similar identity

    F_M(x) = int_0^1 F3(x/sqrt(u)) F_M(x/sqrt(1-u)) du,

which follows from conditioning the maximum on the first stick of the
uniform stick-breaking sequence: the remaining sticks form a rescaled
independent copy of the whole problem.  On a fine grid over [0.05, 4.5)
this is solved to fixed point, seeded by inversion values on [4.5, 6]
where 1 - F_M < 1e-17 makes the seeds essentially exact; the density is
the grid derivative, so it is consistent with the cdf by construction.
Above 4.5 the raw inversion is used directly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

_ALGORITHMS = ("gaver_stehfest", "euler_summation")
_PRECISIONS = ("machine", "extended-double")
# noise amplification doubles roughly every 2 orders; these caps keep the
# weighted sum above the rounding floor of each precision
_MAX_ORDER = {"machine": 18, "extended-double": 24}


@dataclass(frozen=True)
class InversionConfig:
    algorithm: str = "gaver_stehfest"
    order: int = 14
    work_precision: str = "machine"

    def __post_init__(self) -> None:
        if self.algorithm not in _ALGORITHMS:
            raise ValueError(f"unknown algorithm {self.algorithm!r}")
        if self.work_precision not in _PRECISIONS:
            raise ValueError(f"unknown work_precision {self.work_precision!r}")
        if self.order < 2 or self.order % 2:
            raise ValueError("order must be an even integer >= 2")
        cap = _MAX_ORDER[self.work_precision]
        if self.order > cap:
            raise OverflowError(
                f"order {self.order} loses all significance at "
                f"{self.work_precision} precision (cap {cap})")


@lru_cache(maxsize=8)
def stehfest_weights(order: int) -> tuple[Fraction, ...]:
    """Exact rational Gaver-Stehfest weights for an even order."""
    half = order // 2
    out = []
    for k in range(1, order + 1):
        acc = Fraction(0)
        for j in range((k + 1) // 2, min(k, half) + 1):
            acc += (Fraction(j ** half) * math.factorial(2 * j)) / (
                math.factorial(half - j) * math.factorial(j)
                * math.factorial(j - 1) * math.factorial(k - j)
                * math.factorial(2 * j - k))
        out.append(-acc if (k + half) % 2 else acc)
    return tuple(out)


@lru_cache(maxsize=8)
def _weights_float(order: int) -> tuple[float, ...]:
    return tuple(float(w) for w in stehfest_weights(order))


@lru_cache(maxsize=8)
def _weights_longdouble(order: int):
    # string round-trip keeps every bit the ratio of exact integers offers
    return np.array([np.longdouble(str(w.numerator))
                     / np.longdouble(str(w.denominator))
                     for w in stehfest_weights(order)])


_LN2_LD = np.log(np.longdouble(2.0))


def invert(transform, t: float, config: InversionConfig | None = None) -> float:
    """Approximate the inverse Laplace transform of ``transform`` at ``t``.

    ``transform`` is evaluated at real s > 0 only.
    """
    cfg = config or InversionConfig()
    if cfg.algorithm == "euler_summation":
        raise NotImplementedError(
            "euler_summation needs the transform at complex arguments, "
            "which the Bessel layer does not provide")
    if t <= 0.0:
        raise ValueError("inversion time t must be positive")
    if cfg.work_precision == "machine":
        a = math.log(2.0) / t
        ws = _weights_float(cfg.order)
        return a * math.fsum(w * transform(a * k)
                             for k, w in enumerate(ws, start=1))
    # extended path hands the transform a long double; arithmetic-only
    # transforms then keep extended precision end to end
    a = _LN2_LD / np.longdouble(t)
    ws = _weights_longdouble(cfg.order)
    acc = np.longdouble(0.0)
    for k in range(1, cfg.order + 1):
        acc += ws[k - 1] * np.longdouble(transform(a * np.longdouble(k)))
    return float(a * acc)


# ---------------------------------------------------------------------------
# Extended-precision evaluation of nu for the distribution layer
# ---------------------------------------------------------------------------
# 24-point Gauss-Legendre rule to 27 digits, consumed as long doubles.

_NU_GL_X = (
    "-0.99518721999702136017999741",
    "-0.974728555971309498198391993",
    "-0.938274552002732758523649002",
    "-0.886415527004401034213154342",
    "-0.820001985973902921953949873",
    "-0.740124191578554364243828103",
    "-0.648093651936975569252495787",
    "-0.545421471388839535658375617",
    "-0.433793507626045138487084232",
    "-0.315042679696163374386793291",
    "-0.191118867473616309158639821",
    "-0.0640568928626056260850430826",
    "0.0640568928626056260850430826",
    "0.191118867473616309158639821",
    "0.315042679696163374386793291",
    "0.433793507626045138487084232",
    "0.545421471388839535658375617",
    "0.648093651936975569252495787",
    "0.740124191578554364243828103",
    "0.820001985973902921953949873",
    "0.886415527004401034213154342",
    "0.938274552002732758523649002",
    "0.974728555971309498198391993",
    "0.99518721999702136017999741",
)
_NU_GL_W = (
    "0.0123412297999871995468056671",
    "0.028531388628933663181307816",
    "0.0442774388174198061686027482",
    "0.0592985849154367807463677585",
    "0.0733464814110803057340336153",
    "0.086190161531953275917185203",
    "0.0976186521041138882698806645",
    "0.107444270115965634782577342",
    "0.115505668053725601353344484",
    "0.121670472927803391204463153",
    "0.125837456346828296121375383",
    "0.127938195346752156974056165",
    "0.127938195346752156974056165",
    "0.125837456346828296121375383",
    "0.121670472927803391204463153",
    "0.115505668053725601353344484",
    "0.107444270115965634782577342",
    "0.0976186521041138882698806645",
    "0.086190161531953275917185203",
    "0.0733464814110803057340336153",
    "0.0592985849154367807463677585",
    "0.0442774388174198061686027482",
    "0.028531388628933663181307816",
    "0.0123412297999871995468056671",
)
_GLX_LD = np.array([np.longdouble(s) for s in _NU_GL_X])
_GLW_LD = np.array([np.longdouble(s) for s in _NU_GL_W])
_SQRT8_LD = np.sqrt(np.longdouble(8.0))


def _bessel_pair_extended(z):
    """K0 and K1 on a flat long-double array, valid for 1.5 <= z <= 57.

    Five fixed Gauss panels on [0, acosh(57/z)] integrate
    exp(-z cosh t) cosh(nu t); the omitted tail is below exp(-57).
    """
    big_t = np.arccosh(np.longdouble(57.0) / z)
    k0 = np.zeros_like(z)
    k1 = np.zeros_like(z)
    for p in range(5):
        a = big_t * (np.longdouble(p) / 5)
        b = big_t * (np.longdouble(p + 1) / 5)
        h = (b - a) / 2
        c = (a + b) / 2
        for i in range(24):
            t = c + h * _GLX_LD[i]
            ch = np.cosh(t)
            e = np.exp(-z * ch) * (_GLW_LD[i] * h)
            k0 += e
            k1 += e * ch
    return k0, k1


def _nu_extended(x):
    """Vectorized long-double nu(x); requires min(x) >= 0.54 so every
    series argument sits in the quadrature's validity range."""
    x = np.atleast_1d(np.asarray(x, dtype=np.longdouble))
    z0 = _SQRT8_LD * x
    n_max = int(np.max(np.longdouble(46.0) / z0)) + 1
    out = np.zeros_like(x)
    for n in range(1, n_max + 1):
        z = z0 * n
        mask = z <= 46.0          # dropped terms are below 4e-19
        if not mask.any():
            break
        zm = z[mask]
        k0, k1 = _bessel_pair_extended(zm)
        out[mask] += 4 * (zm * k1 - k0)
    return out


# ---------------------------------------------------------------------------
# The law of M
# ---------------------------------------------------------------------------

_X_LO = 0.05          # below this the cdf is far under any representable tail
_X_HI = 4.5           # refinement window is [_X_LO, _X_HI)
_X_TOP = 6.0          # seed range for the fixed point is [_X_HI, _X_TOP]
_STEP = 0.002
_SNAP_ONE = 1e-7      # raw inversion above 1 - 1e-7 snaps to exactly 1

# cdf/pdf/quantile default to the most accurate supported inversion
_DIST_CFG = InversionConfig(order=18, work_precision="extended-double")

_TABLES: dict[tuple, tuple] = {}


def _f3_batch(y):
    """Vectorized excursion-maximum cdf with the standard clamp at 0.2."""
    y = np.asarray(y, dtype=np.float64)
    out = np.zeros_like(y)
    live = y >= 0.2
    yl = y[live]
    s = np.zeros_like(yl)
    for n in range(1, 33):
        q = (2.0 * n * n) * yl * yl
        s += (2.0 * q - 1.0) * np.exp(-q)
    out[live] = np.clip(1.0 - 2.0 * s, 0.0, 1.0)
    return out


def _raw_cdf_many(xs, order: int):
    """Raw Gaver-Stehfest cdf values for an array of x >= 2; long-double path."""
    xs = np.asarray(xs, dtype=np.longdouble)
    k = np.arange(1, order + 1, dtype=np.longdouble)
    a = _LN2_LD * xs * xs                     # ln2 / t with t = 1/x^2
    s = a[:, None] * k[None, :]
    nu = _nu_extended(np.sqrt(s).ravel()).reshape(s.shape)
    w = _weights_longdouble(order)
    vals = a * np.sum(w[None, :] * np.exp(-nu) / s, axis=1)
    return np.asarray(vals, dtype=np.float64)


def _raw_cdf_one(x: float, order: int) -> float:
    return float(_raw_cdf_many(np.array([x]), order)[0])


def _raw_pdf_one(x: float, order: int) -> float:
    xl = np.longdouble(x)
    k = np.arange(1, order + 1, dtype=np.longdouble)
    a = _LN2_LD * xl * xl
    s = a * k
    nu = _nu_extended(np.sqrt(s))
    w = _weights_longdouble(order)
    val = a * np.sum(w * (-np.expm1(-nu)))
    return float(2 / xl ** 3 * val)


def _distribution_table(cfg: InversionConfig):
    """Solved (grid, cdf, pdf) triple for the refinement window; cached."""
    key = (cfg.algorithm, cfg.order, cfg.work_precision)
    cached = _TABLES.get(key)
    if cached is not None:
        return cached

    n_pts = int(round((_X_TOP - _X_LO) / _STEP)) + 1
    grid = np.linspace(_X_LO, _X_TOP, n_pts)
    i_hi = int(round((_X_HI - _X_LO) / _STEP))

    F = np.ones(n_pts)
    F[i_hi:] = np.clip(_raw_cdf_many(grid[i_hi:], cfg.order), 0.0, 1.0)

    # composite Gauss nodes for int_0^1 F3(x/v) F(x/sqrt(1-v^2)) 2v dv,
    # the u = v^2 form of the first-stick identity
    glx = np.asarray(_GLX_LD, dtype=np.float64)
    glw = np.asarray(_GLW_LD, dtype=np.float64)
    n_panels = 8
    nodes01 = np.concatenate(
        [(2 * p + 1) / (2 * n_panels) + glx / (2 * n_panels)
         for p in range(n_panels)])
    w01 = np.tile(glw / (2 * n_panels), n_panels)

    xs = grid[:i_hi]
    vmax = np.minimum(1.0, 5.0 * xs)          # F3 clamp kills v > 5x
    V = vmax[:, None] * nodes01[None, :]
    W = vmax[:, None] * w01[None, :]
    fixed = _f3_batch(xs[:, None] / V) * 2.0 * V * W

    args = (xs[:, None] / np.sqrt(1.0 - V * V)).ravel()
    idx = np.clip(np.searchsorted(grid, args) - 1, 0, n_pts - 2)
    frac = np.clip((args - grid[idx]) / (grid[idx + 1] - grid[idx]), 0.0, 1.0)
    above = args >= grid[-1]

    for _ in range(600):
        fv = F[idx] * (1.0 - frac) + F[idx + 1] * frac
        fv[above] = 1.0
        new = np.einsum("ij,ij->i", fixed, fv.reshape(V.shape))
        delta = float(np.max(np.abs(new - F[:i_hi])))
        F[:i_hi] = new
        if delta < 1e-15:
            break

    dens = np.zeros(n_pts)
    dens[2:-2] = (F[:-4] - 8 * F[1:-3] + 8 * F[3:-1] - F[4:]) / (12 * _STEP)
    dens[1] = (F[2] - F[0]) / (2 * _STEP)
    dens[-2] = (F[-1] - F[-3]) / (2 * _STEP)
    dens = np.maximum(dens, 0.0)

    table = (grid, F, dens)
    _TABLES[key] = table
    return table


def _dist_config(config: InversionConfig | None) -> InversionConfig:
    cfg = config or _DIST_CFG
    if cfg.algorithm != "gaver_stehfest":
        raise NotImplementedError(
            "the distribution layer is only available through gaver_stehfest")
    return cfg


def cdf(x: float, config: InversionConfig | None = None) -> float:
    """P(M <= x)."""
    if x <= 0.0:
        raise ValueError("cdf requires x > 0")
    cfg = _dist_config(config)
    if x < _X_LO:
        return 0.0
    if x < _X_HI:
        grid, F, _ = _distribution_table(cfg)
        return float(np.interp(x, grid, F))
    raw = _raw_cdf_one(x, cfg.order)
    if raw > 1.0 - _SNAP_ONE:
        return 1.0
    return min(1.0, max(0.0, raw))


def pdf(x: float, config: InversionConfig | None = None) -> float:
    """Density of M at x."""
    if x <= 0.0:
        raise ValueError("pdf requires x > 0")
    cfg = _dist_config(config)
    if x < _X_LO + 2 * _STEP:
        return 0.0
    if x < _X_HI:
        grid, _, dens = _distribution_table(cfg)
        return float(np.interp(x, grid, dens))
    return max(0.0, _raw_pdf_one(x, cfg.order))


def quantile(p: float, config: InversionConfig | None = None) -> float:
    """Root of cdf(x) = p, bracketed bisection plus a secant polish."""
    if not 0.0 < p < 1.0:
        raise ValueError("quantile requires p in (0, 1)")
    cfg = _dist_config(config)
    lo, hi = _X_LO, 8.0
    flo = cdf(lo, cfg) - p
    fhi = cdf(hi, cfg) - p
    if flo >= 0.0:
        return lo
    if fhi <= 0.0:
        return hi
    for _ in range(40):
        mid = 0.5 * (lo + hi)
        fm = cdf(mid, cfg) - p
        if fm < 0.0:
            lo, flo = mid, fm
        else:
            hi, fhi = mid, fm
    # one secant step inside the final bracket sharpens the last digits
    if fhi != flo:
        sec = lo - flo * (hi - lo) / (fhi - flo)
        if lo < sec < hi:
            return sec
    return 0.5 * (lo + hi)
