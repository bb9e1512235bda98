"""Bivariate-normal positive-part identities: closed forms vs Monte Carlo
and the internal consistency chain down to the straddle densities."""

import math

import numpy as np
import pytest

from majorant_gap import path_lab
from majorant_gap.identities import (
    BivariateNormalCorr,
    positive_part_product_mean,
    quadrant_prob,
    scaled_positive_part_mean,
)

TWO_PI = 2.0 * math.pi


@pytest.fixture(scope="module")
def normal_pairs():
    """10^6 iid standard-normal pairs shared by the MC oracle tests."""
    rng = np.random.default_rng(424242)
    return rng.standard_normal((2, 10**6))


def _correlated(normal_pairs, rho):
    z = normal_pairs
    return z[0], rho * z[0] + math.sqrt(1.0 - rho * rho) * z[1]


class TestQuadrantProb:
    def test_independence_gives_quarter(self):
        assert quadrant_prob(0.0) == 0.25

    def test_closed_form_special_angles(self):
        # arctan(+-1/sqrt(3)) = +-pi/6 collapses the formula to 1/3 and 1/6
        assert quadrant_prob(0.5) == pytest.approx(1.0 / 3.0, abs=1e-15)
        assert quadrant_prob(-0.5) == pytest.approx(1.0 / 6.0, abs=1e-15)

    def test_comonotone_limit(self):
        assert 0.49 < quadrant_prob(0.9999) < 0.5

    def test_against_mc(self, normal_pairs):
        rho = -0.5
        x, y = _correlated(normal_pairs, rho)
        emp = float(np.mean((x > 0.0) & (y > 0.0)))
        se = math.sqrt(emp * (1.0 - emp) / x.size)
        assert abs(emp - quadrant_prob(rho)) <= 3.0 * se

    def test_orthant_symmetry(self):
        worst = max(
            abs(quadrant_prob(r) + quadrant_prob(-r) - 0.5)
            for r in np.linspace(-0.999, 0.999, 401)
        )
        assert worst <= 1e-14

    def test_arctan_reflection_forms_agree(self):
        # for negative correlation the reflected arctan form must match
        for rho in np.linspace(-0.999, -0.001, 200):
            root = math.sqrt(1.0 - rho * rho)
            direct = (0.5 * math.pi + math.atan2(rho, root)) / TWO_PI
            reflected = -math.atan(root / rho) / TWO_PI
            assert abs(direct - reflected) <= 1e-14
            assert quadrant_prob(rho) == direct

    def test_monotone_in_correlation(self):
        grid = np.linspace(-0.99, 0.99, 100)
        vals = [quadrant_prob(r) for r in grid]
        assert all(b > a for a, b in zip(vals, vals[1:]))

    @pytest.mark.parametrize("rho", [-1.0, 1.0, -1.5, 2.0])
    def test_domain(self, rho):
        with pytest.raises(ValueError):
            quadrant_prob(rho)


class TestPositivePartProductMean:
    def test_independence_factorizes(self):
        # E(X+)^2 with E(X+) = 1/sqrt(2 pi)
        assert positive_part_product_mean(0.0) == pytest.approx(
            1.0 / TWO_PI, abs=1e-16
        )

    def test_comonotone_limit(self):
        # rho -> 1 turns the product into X+^2 with mean 1/2
        assert 0.49 < positive_part_product_mean(0.9999) < 0.5

    def test_against_mc(self, normal_pairs):
        rho = -0.5
        x, y = _correlated(normal_pairs, rho)
        prods = np.maximum(x, 0.0) * np.maximum(y, 0.0)
        se = float(prods.std(ddof=1)) / math.sqrt(prods.size)
        assert abs(float(prods.mean()) - positive_part_product_mean(rho)) <= 3.0 * se

    def test_positive_everywhere(self):
        for rho in np.linspace(-0.999, 0.999, 101):
            assert positive_part_product_mean(rho) > 0.0

    @pytest.mark.parametrize("rho", [-1.0, 1.0, 7.0])
    def test_domain(self, rho):
        with pytest.raises(ValueError):
            positive_part_product_mean(rho)


class TestScaledPositivePartMean:
    def test_equal_scales_closed_form(self):
        assert scaled_positive_part_mean(1.0, 1.0) == pytest.approx(
            (1.0 - math.pi / 4.0) / TWO_PI, abs=1e-16
        )

    def test_against_mc(self, normal_pairs):
        z, w = normal_pairs
        vals = np.maximum(z, 0.0) * np.maximum(w - z, 0.0)
        se = float(vals.std(ddof=1)) / math.sqrt(vals.size)
        assert abs(float(vals.mean()) - scaled_positive_part_mean(1.0, 1.0)) <= 3.0 * se

    def test_flat_ratio_limit(self):
        # b/a -> 0 kills the mean at cubic rate
        assert scaled_positive_part_mean(100.0, 1.0) < 1e-5

    def test_depends_on_ratio_up_to_scale(self):
        # b * value is a function of b/a alone
        base = 1.0 * scaled_positive_part_mean(2.0, 1.0)
        for c in (0.1, 0.5, 3.0, 40.0):
            scaled = c * 1.0 * scaled_positive_part_mean(c * 2.0, c * 1.0)
            assert scaled == pytest.approx(base, rel=1e-13)

    def test_correlated_pair_route_agrees(self):
        # the normalized pair (Z, W/a - Z/b) is bivariate normal with
        # correlation -1/sqrt(1 + (b/a)^2); both evaluation routes must match
        for a, b in ((1.0, 1.0), (0.2, 3.0), (5.0, 0.4), (2.0, 2.0), (0.7, 1.3)):
            t = b / a
            hypo = math.sqrt(1.0 + t * t)
            derived = hypo / b * positive_part_product_mean(-1.0 / hypo)
            assert derived == pytest.approx(
                scaled_positive_part_mean(a, b), abs=1e-13, rel=1e-12
            )

    @pytest.mark.parametrize("a,b", [(0.0, 1.0), (1.0, 0.0), (-1.0, 2.0), (2.0, -0.5)])
    def test_domain(self, a, b):
        with pytest.raises(ValueError):
            scaled_positive_part_mean(a, b)


class TestStraddleDensityChain:
    """The vertex-straddle densities factor through the scaled positive-part
    mean; re-deriving them that way must reproduce the closed forms."""

    def test_motion_chain(self):
        worst = 0.0
        for v1 in (0.05, 0.2, 0.3, 0.55, 0.8, 0.97):
            for v2 in (1.02, 1.3, 1.5, 2.5, 6.0, 12.0):
                d = v2 - v1
                via = 2.0 / d**1.5 * scaled_positive_part_mean(
                    math.sqrt(v1), math.sqrt(d)
                )
                direct = path_lab.straddle_density_motion(v1, v2, 1.0)
                worst = max(worst, abs(via - direct))
        assert worst <= 1e-10

    def test_bridge_chain(self):
        worst = 0.0
        for x in (0.05, 0.2, 0.45):
            for y in (0.55, 0.8, 0.95):
                d = y - x
                via = 2.0 / d**1.5 * scaled_positive_part_mean(
                    math.sqrt(x * (1.0 - y)), math.sqrt(d)
                )
                direct = path_lab.straddle_density_bridge(x, y, 0.5)
                worst = max(worst, abs(via - direct))
        assert worst <= 1e-10


class TestBivariateNormalCorr:
    def test_accepts_interior(self):
        assert BivariateNormalCorr(0.3).rho == 0.3

    @pytest.mark.parametrize("rho", [-1.0, 1.0, -1.5, 1.5])
    def test_rejects_boundary_and_outside(self, rho):
        with pytest.raises(ValueError):
            BivariateNormalCorr(rho)
