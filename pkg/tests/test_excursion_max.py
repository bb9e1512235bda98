"""Theta-series law of the excursion maximum: series values, quantiles,
sampler, and the truncation policy."""

import math

import numpy as np
import pytest
from scipy import integrate

from majorant_gap.excursion_max import (
    M3Law,
    default_law,
    f3_cdf,
    f3_pdf,
    f3_quantile,
    sample_m3,
)
from majorant_gap.special_fns import SeriesControl
from majorant_gap._stats import ks_critical, ks_distance


def _cdf_oracle(y: float) -> float:
    """200-term compensated summation, independent of the truncation policy."""
    terms = [(4 * n * n * y * y - 1.0) * math.exp(-2.0 * n * n * y * y)
             for n in range(1, 201)]
    return 1.0 - 2.0 * math.fsum(terms)


class TestCdf:
    def test_zero_below_clamp(self):
        assert f3_cdf(0.0) == 0.0
        assert f3_cdf(-1.0) == 0.0
        assert f3_cdf(0.19) == 0.0

    def test_saturates_right(self):
        assert abs(f3_cdf(10.0) - 1.0) < 1e-15

    def test_against_long_summation(self):
        for y in (0.4, 0.7, 1.0, 1.6, 2.5):
            assert abs(f3_cdf(y) - _cdf_oracle(y)) < 1e-10

    def test_nondecreasing(self):
        grid = np.linspace(0.05, 4.0, 400)
        vals = [f3_cdf(float(y)) for y in grid]
        assert all(b >= a for a, b in zip(vals, vals[1:]))

    def test_truncation_stability(self):
        # doubling the term cap must not move the value beyond abs_tol
        loose = M3Law(control=SeriesControl(max_terms=10_000))
        tight = M3Law(control=SeriesControl(max_terms=20_000))
        for y in (0.25, 0.5, 1.0, 2.0):
            assert abs(loose.f3_cdf(y) - tight.f3_cdf(y)) < 1e-12


class TestPdf:
    def test_zero_below_clamp(self):
        assert f3_pdf(0.0) == 0.0
        assert f3_pdf(0.15) == 0.0

    def test_normalization(self):
        val, err = integrate.quad(f3_pdf, 0.2, 12.0, limit=300,
                                  epsabs=1e-12, epsrel=1e-12)
        assert err < 1e-9
        assert abs(val - 1.0) < 1e-8

    def test_matches_cdf_derivative(self):
        h = 1e-4
        fd = (f3_cdf(1.2 + h) - f3_cdf(1.2 - h)) / (2 * h)
        assert abs(fd - f3_pdf(1.2)) < 1e-6

    def test_nonnegative(self):
        for y in np.linspace(0.0, 5.0, 300):
            assert f3_pdf(float(y)) >= 0.0


class TestQuantile:
    def test_round_trip_from_value(self):
        assert abs(f3_quantile(f3_cdf(1.0)) - 1.0) < 1e-9

    def test_median_self_consistency(self):
        med = f3_quantile(0.5)
        assert abs(f3_cdf(med) - 0.5) < 1e-12

    def test_monotone(self):
        assert f3_quantile(0.25) < f3_quantile(0.75)

    def test_domain(self):
        for p in (0.0, 1.0, -0.2, 1.3):
            with pytest.raises(ValueError):
                f3_quantile(p)


class TestSampler:
    def test_deterministic(self):
        a = sample_m3(np.random.default_rng(99))
        b = sample_m3(np.random.default_rng(99))
        assert a == b

    def test_mean(self):
        # E(M3) by quadrature of the survival function
        target, _ = integrate.quad(lambda y: 1.0 - f3_cdf(y), 0.0, 12.0,
                                   limit=300, epsabs=1e-12)
        rng = np.random.default_rng(5)
        draws = np.array([sample_m3(rng) for _ in range(100_000)])
        se = draws.std(ddof=1) / math.sqrt(draws.size)
        assert abs(draws.mean() - target) < 3 * se

    def test_ks_against_cdf(self):
        rng = np.random.default_rng(11)
        draws = np.array([sample_m3(rng) for _ in range(10_000)])
        assert ks_distance(draws, f3_cdf) < ks_critical(draws.size, 0.01)


class TestLawConstruction:
    def test_cutoff_must_be_negligible(self):
        with pytest.raises(ValueError):
            M3Law(small_y_cutoff=0.5)
        with pytest.raises(ValueError):
            M3Law(small_y_cutoff=-0.1)

    def test_default_shared_instance(self):
        assert default_law() is default_law()
