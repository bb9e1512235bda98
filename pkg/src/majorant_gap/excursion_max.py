"""Law of the maximum of a standard Brownian excursion (equivalently, the
range of a standard Brownian bridge): theta-series CDF and density, quantiles
by bracketed inversion, and an exact-inversion sampler.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .special_fns import SeriesControl


def _raw_series_value(y: float, max_terms: int) -> float:
    # Untruncated-cancellation check in compensated arithmetic; only used to
    # validate the small-y clamp at construction time.
    terms = []
    n = 0
    while n < max_terms:
        n += 1
        a = n * y
        e = 2.0 * a * a
        terms.append((2.0 * e - 1.0) * math.exp(-e))
        if a >= 2.0 and abs(terms[-1]) < 1e-18:
            break
    return 1.0 - 2.0 * math.fsum(terms)


@dataclass(frozen=True)
class M3Law:
    """Excursion-maximum law with explicit series truncation policy.

    Below ``small_y_cutoff`` the CDF is clamped to exactly 0; the constructor
    verifies that the true value there is below 1e-15, so the clamp never
    costs more than the series tolerance.
    """

    control: SeriesControl = field(default_factory=SeriesControl)
    small_y_cutoff: float = 0.2

    def __post_init__(self) -> None:
        if not self.small_y_cutoff > 0.0:
            raise ValueError("small_y_cutoff must be positive")
        if abs(_raw_series_value(self.small_y_cutoff, 10_000)) >= 1e-15:
            raise ValueError(
                "small_y_cutoff too large: the CDF is not negligible there"
            )

    def f3_cdf(self, y: float) -> float:
        return _kernels.f3_cdf(
            float(y), self.small_y_cutoff, self.control.abs_tol, self.control.max_terms
        )

    def f3_pdf(self, y: float) -> float:
        return _kernels.f3_pdf(
            float(y), self.small_y_cutoff, self.control.abs_tol, self.control.max_terms
        )

    def f3_quantile(self, p: float) -> float:
        if not 0.0 < p < 1.0:
            raise ValueError("quantile requires p in (0, 1)")
        return _kernels.f3_quantile(
            float(p), self.small_y_cutoff, self.control.abs_tol, self.control.max_terms
        )

    def sample_m3(self, rng: np.random.Generator) -> float:
        u = float(rng.random())
        if u <= 0.0:
            u = 1e-300  # keep the draw inside the open interval
        return self.f3_quantile(u)


_DEFAULT = M3Law()


def default_law() -> M3Law:
    return _DEFAULT


def f3_cdf(y: float, law: M3Law | None = None) -> float:
    return (law or _DEFAULT).f3_cdf(y)


def f3_pdf(y: float, law: M3Law | None = None) -> float:
    return (law or _DEFAULT).f3_pdf(y)


def f3_quantile(p: float, law: M3Law | None = None) -> float:
    return (law or _DEFAULT).f3_quantile(p)


def sample_m3(rng: np.random.Generator, law: M3Law | None = None) -> float:
    return (law or _DEFAULT).sample_m3(rng)
