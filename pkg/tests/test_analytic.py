"""Adaptive quadrature, the nu tail, the Bessel-product function G, and the
moment integral."""

import math

import numpy as np
import pytest

from majorant_gap import laplace_inv
from majorant_gap.analytic import (
    GFunction,
    QuadratureError,
    QuadratureSpec,
    default_g,
    g_eval,
    integrate,
    log_gamma,
    moment,
    nu_tail,
    nu_tail_integral,
    one_minus_g,
)
from majorant_gap.mc_sampler import MSampleConfig, sample_m_many


class TestIntegrate:
    def test_polynomial_exact(self):
        assert abs(integrate(lambda x: x * x, 0.0, 1.0) - 1.0 / 3.0) < 1e-13

    def test_sine(self):
        assert abs(integrate(math.sin, 0.0, math.pi) - 2.0) < 1e-11

    def test_depth_exhaustion_raises(self):
        spec = QuadratureSpec(rel_tol=1e-13, abs_tol=1e-15, max_depth=10)
        with pytest.raises(QuadratureError):
            integrate(lambda x: abs(x - 1.0 / math.pi) ** -0.9, 0.0, 1.0,
                      spec=spec)

    def test_spec_validation(self):
        with pytest.raises(ValueError):
            QuadratureSpec(rel_tol=0.0)
        with pytest.raises(ValueError):
            QuadratureSpec(max_depth=5)


class TestLogGamma:
    def test_known_values(self):
        assert log_gamma(1.0) == 0.0
        assert abs(log_gamma(0.5) - 0.5 * math.log(math.pi)) < 1e-14
        assert abs(log_gamma(5.0) - math.log(24.0)) < 1e-13

    def test_against_reference(self):
        for x in np.linspace(0.1, 30.0, 50):
            assert abs(log_gamma(float(x)) - math.lgamma(float(x))) < 1e-12

    def test_domain(self):
        with pytest.raises(ValueError):
            log_gamma(0.0)


class TestNuTail:
    def test_far_tail_small_but_positive(self):
        v = nu_tail(20.0)
        assert 0.0 < v < 1e-20

    def test_underflow_region_exact_zero(self):
        assert nu_tail(250.0) == 0.0

    def test_series_matches_integral(self):
        for x in (0.1, 0.3, 1.0, 2.5, 5.0):
            assert abs(nu_tail(x) - nu_tail_integral(x)) < 1e-8

    def test_small_x_value(self):
        # below the series switch; both routes agree and pin the value
        assert abs(nu_tail(0.05) - 5.82146608) < 1e-6
        assert abs(nu_tail(0.05) - nu_tail_integral(0.05)) < 1e-8

    def test_domain(self):
        with pytest.raises(ValueError):
            nu_tail(0.0)


class TestGEval:
    def test_exp_relation(self):
        for x in (0.5, 1.0, 2.0):
            assert abs(math.exp(-nu_tail(x)) - g_eval(x)) < 1e-10

    def test_saturates_right(self):
        assert abs(g_eval(20.0) - 1.0) < 1e-15

    def test_left_tail_value(self):
        assert abs(g_eval(0.05) - 2.96326e-3) < 5e-8

    def test_monotone_and_bounded(self):
        grid = np.linspace(0.05, 6.0, 120)
        vals = [g_eval(float(t)) for t in grid]
        assert all(0.0 <= v <= 1.0 for v in vals)
        assert all(b >= a for a, b in zip(vals, vals[1:]))

    def test_one_minus_g_tail_accuracy(self):
        # complement keeps relative accuracy where g is within 1e-12 of 1
        x = 8.0
        assert abs(one_minus_g(x) / nu_tail(x) - 1.0) < 1e-6

    def test_exponential_time_change_matches_mc(self, m_samples_20k):
        # P(sqrt(gamma) * M <= 1) for an independent unit exponential gamma
        rng = np.random.default_rng(97)
        gam = rng.exponential(size=m_samples_20k.size)
        p_emp = float(np.mean(np.sqrt(gam) * m_samples_20k <= 1.0))
        se = math.sqrt(p_emp * (1.0 - p_emp) / m_samples_20k.size)
        assert abs(p_emp - g_eval(1.0)) < 3 * se

    def test_domain(self):
        with pytest.raises(ValueError):
            g_eval(-1.0)


class TestMoment:
    def test_first_and_mid_orders(self):
        assert abs(moment(1.0) - 0.999399) < 5e-4
        assert abs(moment(4.0) - 1.431334) < 5e-4

    def test_high_order(self):
        assert abs(moment(8.0) - 5.212503) < 5e-3

    def test_jensen(self):
        assert moment(2.0) >= moment(1.0) ** 2

    def test_log_convex_in_order(self):
        vals = [moment(float(r)) for r in range(1, 9)]
        logs = [math.log(v) for v in vals]
        for i in range(1, 7):
            assert 2 * logs[i] <= logs[i - 1] + logs[i + 1] + 1e-9

    def test_domain(self):
        with pytest.raises(ValueError):
            moment(0.0)


class TestTailBound:
    def test_m_beyond_six_is_negligible(self):
        # exponential tilt: P(M > 6) <= e^y * nu(6 sqrt(y)) at y = 4
        assert math.exp(4.0) * nu_tail(12.0) < 1e-9
        assert 1.0 - laplace_inv.cdf(6.0) == 0.0


class TestGFunctionConfig:
    def test_shared_default(self):
        assert default_g() is default_g()

    def test_custom_control_consistent(self):
        g = GFunction()
        assert abs(g.nu_tail(1.0) - nu_tail(1.0)) < 1e-14
