"""Bivariate-normal positive-part identities.

Closed forms for the positive-quadrant probability and the mean of the
product of positive parts under a standard bivariate normal, plus the
scaled two-variable variant these combine into.  The straddle densities in
the path laboratory factor through the scaled form, which is the reason
these live in their own module and carry internal cross-checks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

_TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class BivariateNormalCorr:
    """Correlation parameter of a standard bivariate normal pair."""

    rho: float

    def __post_init__(self) -> None:
        if not -1.0 < self.rho < 1.0:
            raise ValueError("correlation must satisfy |rho| < 1")


def quadrant_prob(rho: float) -> float:
    """P(X > 0, Y > 0) for standard bivariate normal (X, Y), corr ``rho``.

    Computed as (pi/2 + arctan(rho/sqrt(1 - rho^2))) / (2 pi).  For
    negative rho the arctan-reflected form -arctan(sqrt(1 - rho^2)/rho)
    / (2 pi) is evaluated too and must agree to 1e-14.
    """
    corr = BivariateNormalCorr(float(rho)).rho
    root = math.sqrt(1.0 - corr * corr)
    value = (0.5 * math.pi + math.atan2(corr, root)) / _TWO_PI
    if corr < 0.0:
        reflected = -math.atan(root / corr) / _TWO_PI
        if abs(reflected - value) > 1e-14:
            raise AssertionError(
                "quadrant probability forms disagree: %r vs %r" % (value, reflected)
            )
    return value


def positive_part_product_mean(rho: float) -> float:
    """E(X+ Y+) for the same pair: sqrt(1 - rho^2)/(2 pi) + rho P(X>0, Y>0)."""
    corr = BivariateNormalCorr(float(rho)).rho
    return math.sqrt(1.0 - corr * corr) / _TWO_PI + corr * quadrant_prob(corr)


def scaled_positive_part_mean(a: float, b: float) -> float:
    """E[Z+ (W/a - Z/b)+] for independent standard normals Z, W; a, b > 0.

    Closed form (b/a - arctan(b/a)) / (2 pi b).  The pair
    (Z, (W/a - Z/b) normalized) is standard bivariate normal with
    correlation -1/sqrt(1 + (b/a)^2), so the same number must come out of
    :func:`positive_part_product_mean` scaled back by the sd
    sqrt(1 + (b/a)^2)/b; both routes are evaluated and must agree.
    """
    a = float(a)
    b = float(b)
    if not (a > 0.0 and b > 0.0):
        raise ValueError("a and b must be positive")
    t = b / a
    value = (t - math.atan(t)) / (_TWO_PI * b)
    hypo = math.sqrt(1.0 + t * t)
    derived = (hypo / b) * positive_part_product_mean(-1.0 / hypo)
    if abs(derived - value) > 1e-12 + 1e-11 * abs(value):
        raise AssertionError(
            "positive-part mean routes disagree: %r vs %r" % (value, derived)
        )
    return value
