"""Uniform stick-breaking, ranking, and size-biased permutations."""

import math

import numpy as np
import pytest

from majorant_gap.stick_breaking import (
    StickSequence,
    count,
    ranked,
    residual_below,
    sample_sticks,
    size_biased_permutation,
)
from majorant_gap._stats import ks_critical, ks_uniform


def _golomb_dickman_oracle() -> float:
    """Mean of the largest stick, via the delay equation for the density of
    smooth-number exponents: t*rho'(t) = -rho(t-1), rho = 1 on [0, 1].

    The mean equals 1 - int_1^inf rho(t)/t^2 dt.  Computed on a fine grid by
    the equivalent integral recursion t*rho(t) = int_{t-1}^{t} rho(s) ds.
    """
    h = 1.0 / 4096.0
    t_max = 40.0
    n = int(round(t_max / h))
    rho = np.ones(n + 1)
    ts = np.arange(n + 1) * h
    # cum[i] = int_0^{t_i} rho, trapezoid; the recursion t*rho(t) =
    # int_{t-1}^t rho couples rho[i] to its own half-step, solved exactly
    cum = np.zeros(n + 1)
    i1 = int(round(1.0 / h))
    for i in range(1, n + 1):
        if i > i1:
            rho[i] = (cum[i - 1] + 0.5 * h * rho[i - 1] - cum[i - i1]) / (
                ts[i] - 0.5 * h)
        cum[i] = cum[i - 1] + 0.5 * h * (rho[i - 1] + rho[i])
    integrand = rho[i1:] / ts[i1:] ** 2
    return 1.0 - float(np.trapezoid(integrand, dx=h))


class TestSampleSticks:
    def test_first_stick_uniform(self):
        rng = np.random.default_rng(31)
        draws = np.array(
            [sample_sticks(rng, count(1)).lengths[0] for _ in range(10_000)])
        assert ks_uniform(draws) < ks_critical(draws.size, 0.01)

    def test_residual_stop(self):
        rng = np.random.default_rng(1)
        for _ in range(50):
            seq = sample_sticks(rng, residual_below(1e-12))
            total = sum(seq.lengths)
            assert 1.0 - 1e-12 < total <= 1.0
            assert seq.residual < 1e-12

    def test_first_stick_mean(self):
        rng = np.random.default_rng(7)
        draws = np.array(
            [sample_sticks(rng, count(1)).lengths[0] for _ in range(100_000)])
        se = draws.std(ddof=1) / math.sqrt(draws.size)
        assert abs(draws.mean() - 0.5) < 3 * se

    def test_self_similarity(self):
        # lengths after a stop at count 3, renormalized by the residual,
        # restart the same process: the next ratio is uniform
        rng = np.random.default_rng(17)
        ratios = []
        for _ in range(10_000):
            seq = sample_sticks(rng, count(4))
            r3 = 1.0 - sum(seq.lengths[:3])
            ratios.append(seq.lengths[3] / r3)
        assert ks_uniform(np.array(ratios)) < ks_critical(10_000, 0.01)

    def test_stop_rule_validation(self):
        with pytest.raises(ValueError):
            count(0)
        with pytest.raises(ValueError):
            residual_below(0.0)
        with pytest.raises(ValueError):
            residual_below(1.0)
        with pytest.raises(TypeError):
            sample_sticks(np.random.default_rng(0), "whenever")


class TestRanked:
    def test_sorts_decreasing(self):
        seq = StickSequence((0.2, 0.5, 0.1), 0.2)
        assert ranked(seq) == (0.5, 0.2, 0.1)

    def test_permutation_of_input(self):
        rng = np.random.default_rng(3)
        seq = sample_sticks(rng, count(8))
        assert sorted(ranked(seq)) == sorted(seq.lengths)

    def test_largest_stick_mean_matches_dickman(self):
        oracle = _golomb_dickman_oracle()
        # sanity-pin the oracle itself against the known constant
        assert abs(oracle - 0.6243299885) < 1e-6
        rng = np.random.default_rng(23)
        draws = np.empty(100_000)
        for i in range(draws.size):
            draws[i] = ranked(sample_sticks(rng, residual_below(1e-9)))[0]
        se = draws.std(ddof=1) / math.sqrt(draws.size)
        assert abs(draws.mean() - oracle) < 3 * se


class TestSizeBiasedPermutation:
    def test_single_element(self):
        assert size_biased_permutation([1.0], np.random.default_rng(0)) == (1.0,)

    def test_two_element_frequency(self):
        rng = np.random.default_rng(41)
        n = 10_000
        hits = sum(
            size_biased_permutation([0.9, 0.1], rng)[0] == 0.9 for _ in range(n))
        assert abs(hits / n - 0.9) < 3 * math.sqrt(0.09 / n)

    def test_rejects_nonpositive(self):
        with pytest.raises(ValueError):
            size_biased_permutation([0.5, 0.0], np.random.default_rng(0))

    def test_invariance_under_rank_then_bias(self):
        # size-biasing a ranked stick set restores the stick-breaking law:
        # successive normalized ratios are i.i.d. uniform
        rng = np.random.default_rng(53)
        reps = 10_000
        r = np.empty((reps, 3))
        for i in range(reps):
            seq = sample_sticks(rng, residual_below(1e-8))
            perm = size_biased_permutation(ranked(seq), rng)
            l1, l2, l3 = perm[0], perm[1], perm[2]
            r[i, 0] = l1
            r[i, 1] = l2 / (1.0 - l1)
            r[i, 2] = l3 / (1.0 - l1 - l2)
        crit = ks_critical(reps, 0.01)
        for k in range(3):
            assert ks_uniform(r[:, k]) < crit
        for a in range(3):
            for b in range(a + 1, 3):
                assert abs(np.corrcoef(r[:, a], r[:, b])[0, 1]) < 0.05


class TestStickSequenceInvariants:
    def test_rejects_bad_mass(self):
        with pytest.raises(ValueError):
            StickSequence((0.5, 0.2), 0.4)  # sums to 1.1
        with pytest.raises(ValueError):
            StickSequence((0.5, -0.1), 0.6)
        with pytest.raises(ValueError):
            StickSequence((0.5,), 1.0)
