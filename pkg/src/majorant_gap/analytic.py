"""Analytic pipeline: the exponent nu(x) of the Bessel-product function G,
G itself, moment integrals of the max-gap law, and the adaptive quadrature
engine these need.

G(t) = exp(-nu(t)) where nu(t) = 2 sum_n (2 A_n - B_n) with
A_n(t) = z K1(z), B_n(t) = 2 K0(z), z = 2 sqrt(2) n t.  The same quantity
has an integral form (an exponentially weighted tail of the excursion-max
law) which is used below t = 0.05, where the series terms suffer
cancellation, and as an independent cross-check everywhere else.
"""

from __future__ import annotations

import heapq
import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .excursion_max import M3Law
from .special_fns import SeriesControl

_TWO_SQRT2 = 2.0 * math.sqrt(2.0)

_G_NODES, _G_WEIGHTS = (tuple(map(float, a)) for a in np.polynomial.legendre.leggauss(15))


class QuadratureError(RuntimeError):
    """Raised when the adaptive engine cannot reach the requested tolerance."""


@dataclass(frozen=True)
class QuadratureSpec:
    rel_tol: float = 1e-10
    abs_tol: float = 1e-12
    max_depth: int = 60

    def __post_init__(self) -> None:
        if not (self.rel_tol > 0.0 and self.abs_tol > 0.0):
            raise ValueError("tolerances must be positive")
        if self.max_depth < 10:
            raise ValueError("max_depth must be at least 10")


def _panel(f, a: float, b: float) -> float:
    h = 0.5 * (b - a)
    c = 0.5 * (a + b)
    acc = 0.0
    for x, w in zip(_G_NODES, _G_WEIGHTS):
        acc += w * f(c + h * x)
    return h * acc


def integrate(f, a: float, b: float, spec: QuadratureSpec | None = None) -> float:
    """Adaptive interval-halving with fixed-order Gauss panels.

    Globally adaptive: the panel with the largest error estimate is split
    until the summed estimate meets max(abs_tol, rel_tol * |integral|).
    """
    spec = spec or QuadratureSpec()
    if b == a:
        return 0.0
    if b < a:
        raise ValueError("integration bounds must be ordered")

    counter = itertools.count()

    def refine(a0: float, b0: float) -> tuple[float, float]:
        mid = 0.5 * (a0 + b0)
        coarse = _panel(f, a0, b0)
        fine = _panel(f, a0, mid) + _panel(f, mid, b0)
        return fine, abs(fine - coarse)

    est, err = refine(a, b)
    heap = [(-err, next(counter), a, b, est, 0)]
    total = est
    total_err = err
    while True:
        tol = max(spec.abs_tol, spec.rel_tol * abs(total))
        if total_err <= tol:
            return total
        neg_err, _, a0, b0, est0, d0 = heapq.heappop(heap)
        if d0 >= spec.max_depth:
            raise QuadratureError(
                "no convergence: depth %d reached on [%g, %g]" % (d0, a0, b0)
            )
        if len(heap) > 20_000:
            raise QuadratureError("no convergence: panel budget exhausted")
        mid = 0.5 * (a0 + b0)
        le, lerr = refine(a0, mid)
        re_, rerr = refine(mid, b0)
        total += (le + re_) - est0
        total_err += (lerr + rerr) + neg_err  # neg_err is -old_err
        heapq.heappush(heap, (-lerr, next(counter), a0, mid, le, d0 + 1))
        heapq.heappush(heap, (-rerr, next(counter), mid, b0, re_, d0 + 1))


def log_gamma(x: float) -> float:
    if x <= 0.0:
        raise ValueError("log_gamma requires x > 0")
    return math.lgamma(x)


@dataclass(frozen=True)
class GFunction:
    """nu and G with explicit truncation and quadrature policies."""

    control: SeriesControl = field(default_factory=SeriesControl)
    quad: QuadratureSpec = field(default_factory=QuadratureSpec)

    # switch to the integral form below this point; the series terms there
    # are differences of same-sized quantities and cancel badly
    series_min_x: float = 0.05

    def nu_tail(self, x: float) -> float:
        if x <= 0.0:
            raise ValueError("nu_tail requires x > 0")
        x = float(x)
        if x < self.series_min_x:
            return self.nu_tail_integral(x)
        terms = []
        n = 0
        while n < self.control.max_terms:
            n += 1
            z = _TWO_SQRT2 * n * x
            if z > 700.0:
                break
            k0, k1 = _kernels.bessel_k0k1(z)
            term = 4.0 * (z * k1 - k0)
            terms.append(term)
            # terms cross zero near z = 0.41; arm the smallness stop later
            if z >= 2.0 and abs(term) < self.control.abs_tol:
                break
        if not terms:
            return 0.0
        return max(0.0, math.fsum(terms))

    def nu_tail_integral(self, x: float, quad: QuadratureSpec | None = None) -> float:
        """Integral form: exponentially weighted right tail of the excursion
        maximum law, after the substitution y = e^v."""
        if x <= 0.0:
            raise ValueError("nu_tail_integral requires x > 0")
        x = float(x)
        law = M3Law(control=self.control)
        v_hi = math.log(40.0)
        v_lo = min(2.0 * math.log(x) - 3.2, v_hi - 1.0)

        def f(v: float) -> float:
            return math.exp(-math.exp(v)) * (1.0 - law.f3_cdf(x * math.exp(-0.5 * v)))

        return max(0.0, integrate(f, v_lo, v_hi, quad or self.quad))

    def g_eval(self, t: float) -> float:
        if t <= 0.0:
            raise ValueError("g_eval requires t > 0")
        return math.exp(-self.nu_tail(t))

    def one_minus_g(self, t: float) -> float:
        # full relative accuracy in the right tail, where g_eval rounds to 1
        if t <= 0.0:
            raise ValueError("one_minus_g requires t > 0")
        return -math.expm1(-self.nu_tail(t))


_DEFAULT_G = GFunction()


def default_g() -> GFunction:
    return _DEFAULT_G


def nu_tail(x: float, gfn: GFunction | None = None) -> float:
    return (gfn or _DEFAULT_G).nu_tail(x)


def nu_tail_integral(x: float, quad: QuadratureSpec | None = None,
                     gfn: GFunction | None = None) -> float:
    return (gfn or _DEFAULT_G).nu_tail_integral(x, quad)


def g_eval(t: float, gfn: GFunction | None = None) -> float:
    return (gfn or _DEFAULT_G).g_eval(t)


def one_minus_g(t: float, gfn: GFunction | None = None) -> float:
    return (gfn or _DEFAULT_G).one_minus_g(t)


def moment(r: float, quad: QuadratureSpec | None = None,
           gfn: GFunction | None = None) -> float:
    """r-th moment of the max-gap law, r > 0 real.

    Split at t = 1.  The left piece is computed after t = u^(1/r), which
    absorbs the t^(r-1) weight exactly; the right piece proceeds in unit
    windows until the bound (k+1)^(r-1) * nu(k) on a window's contribution
    drops below abs_tol (1 - G <= nu).
    """
    if r <= 0.0:
        raise ValueError("moment requires r > 0")
    gf = gfn or _DEFAULT_G
    spec = quad or gf.quad
    inv_r = 1.0 / r

    def left_integrand(u: float) -> float:
        if u <= 0.0:
            return 1.0
        t = u ** inv_r
        if t < 1e-8:  # G < 4e-16 there
            return 1.0
        return gf.one_minus_g(t)

    left = integrate(left_integrand, 0.0, 1.0, spec) / r

    # The tail integrand inherits ~4e-12 of deterministic jitter from the
    # Bessel kernels near their branch crossover (abs error ~5e-13 amplified
    # by the 4(z K1 - K0) combination), scaled further by the t^(r-1) weight.
    # A window cannot be resolved below that floor, so gate each one there;
    # the floor only stops pointless splitting, the windows it affects are
    # orders of magnitude below the moment tolerance.
    tail = 0.0
    k = 1
    while k <= 200:
        weight = (k + 1.0) ** (r - 1.0)
        bound = gf.nu_tail(float(k)) * weight
        if bound < spec.abs_tol:
            break
        window_spec = QuadratureSpec(rel_tol=spec.rel_tol,
                                     abs_tol=max(spec.abs_tol, 1e-11 * weight),
                                     max_depth=spec.max_depth)
        tail += integrate(lambda t: t ** (r - 1.0) * gf.one_minus_g(t),
                          float(k), float(k + 1), window_spec)
        k += 1

    return 2.0 * math.exp(-log_gamma(0.5 * r)) * (left + tail)
