"""Sampler determinism, moment reproduction, and the cdf/pdf estimators."""

import math

import numpy as np
import pytest

from majorant_gap import laplace_inv
from majorant_gap.mc_sampler import (
    MSampleConfig,
    mc_cdf,
    mc_pdf,
    sample_m,
    sample_m_many,
)


class TestDeterminism:
    def test_single_draw_reproducible(self):
        a = sample_m(np.random.default_rng(123))
        b = sample_m(np.random.default_rng(123))
        assert a == b

    def test_thread_count_is_invisible(self):
        cfg = MSampleConfig(seed=9, n_samples=600)
        serial = sample_m_many(cfg, n_threads=1)
        parallel = sample_m_many(cfg, n_threads=3)
        assert np.array_equal(serial, parallel)

    def test_prefix_stability(self):
        # growing n_samples extends the sequence without changing the prefix
        a = sample_m_many(MSampleConfig(seed=5, n_samples=300))
        b = sample_m_many(MSampleConfig(seed=5, n_samples=700))
        assert np.array_equal(a, b[:300])


class TestMoments:
    def test_mean(self, m_samples_20k):
        se = m_samples_20k.std(ddof=1) / math.sqrt(m_samples_20k.size)
        assert abs(m_samples_20k.mean() - 0.999399) < 3 * se

    def test_second_moment(self, m_samples_20k):
        sq = m_samples_20k**2
        se = sq.std(ddof=1) / math.sqrt(sq.size)
        assert abs(sq.mean() - 1.060258) < 3 * se


class TestMcCdf:
    def test_far_right_tail(self):
        rng = np.random.default_rng(0)
        assert mc_cdf(10.0, 200, rng) >= 1.0 - 1e-6

    def test_left_clamp_region(self):
        rng = np.random.default_rng(0)
        assert mc_cdf(0.2, 200, rng) < 1e-6

    def test_agrees_with_empirical(self, m_samples_20k):
        rng = np.random.default_rng(71)
        n = 2000
        est = mc_cdf(1.0, n, rng)
        emp = float(np.mean(m_samples_20k <= 1.0))
        se_est = math.sqrt(est * (1.0 - est) / n)
        se_emp = math.sqrt(emp * (1.0 - emp) / m_samples_20k.size)
        assert abs(est - emp) < 3 * math.hypot(se_est, se_emp)

    def test_monotone_under_common_randomness(self):
        vals = [mc_cdf(x, 500, np.random.default_rng(3))
                for x in (0.5, 0.8, 1.1, 1.4, 2.0, 3.0)]
        assert all(b >= a for a, b in zip(vals, vals[1:]))

    def test_domain(self):
        with pytest.raises(ValueError):
            mc_cdf(0.0, 10, np.random.default_rng(0))


class TestMcPdf:
    def test_far_tail(self):
        rng = np.random.default_rng(0)
        assert mc_pdf(10.0, 200, rng) < 1e-6

    def test_normalization_by_trapezoid(self):
        xs = np.arange(0.2, 4.01, 0.2)
        vals = [mc_pdf(float(x), 10_000, np.random.default_rng(13))
                for x in xs]
        assert abs(float(np.trapezoid(vals, dx=0.2)) - 1.0) < 0.01

    def test_batch_mean_matches_analytic(self):
        # 8 independent 500-draw batches give both a value and its SE
        batches = [mc_pdf(1.0, 500, np.random.default_rng(100 + i))
                   for i in range(8)]
        mean = float(np.mean(batches))
        se = float(np.std(batches, ddof=1)) / math.sqrt(len(batches))
        assert abs(mean - laplace_inv.pdf(1.0)) < 3 * se

    def test_matches_cdf_finite_difference(self):
        # common random numbers across the two cdf calls per batch
        h = 0.05
        fd_batches = []
        pdf_batches = []
        for i in range(8):
            up = mc_cdf(1.0 + h, 500, np.random.default_rng(200 + i))
            dn = mc_cdf(1.0 - h, 500, np.random.default_rng(200 + i))
            fd_batches.append((up - dn) / (2 * h))
            pdf_batches.append(mc_pdf(1.0, 500, np.random.default_rng(300 + i)))
        diff = float(np.mean(fd_batches)) - float(np.mean(pdf_batches))
        se = math.hypot(float(np.std(fd_batches, ddof=1)) / math.sqrt(8),
                        float(np.std(pdf_batches, ddof=1)) / math.sqrt(8))
        assert abs(diff) < 3 * se + 1e-3  # 1e-3 covers the O(h^2) bias

    def test_domain(self):
        with pytest.raises(ValueError):
            mc_pdf(-1.0, 10, np.random.default_rng(0))


class TestConfig:
    def test_validation(self):
        with pytest.raises(ValueError):
            MSampleConfig(residual_eps=0.0)
        with pytest.raises(ValueError):
            MSampleConfig(residual_eps=0.6)
        with pytest.raises(ValueError):
            MSampleConfig(tail_guard=3.0)
        with pytest.raises(ValueError):
            MSampleConfig(n_samples=0)

    def test_thread_validation(self):
        with pytest.raises(ValueError):
            sample_m_many(MSampleConfig(n_samples=4), n_threads=0)
