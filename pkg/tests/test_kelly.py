import math

import numpy as np
import pytest

from kellytree import (
    FeasibilityError,
    MarketParams,
    ks_constrained_fraction,
    ks_feasible_interval,
    ks_grid_oracle,
    ks_growth_derivative,
    ks_growth_rate,
    ks_optimal_fraction,
)

from conftest import random_admissible_market


class TestGrowthRate:
    def test_all_bond_grows_at_log_r(self, mild_market):
        assert ks_growth_rate(0.0, mild_market) == math.log(1.05)

    def test_value_at_the_optimum(self, mild_market):
        # frozen from an independent evaluation of the expectation
        assert ks_growth_rate(0.202898550724637, mild_market) == pytest.approx(
            0.0520004480708934, rel=1e-10
        )

    def test_ruinous_fraction_rejected(self, mild_market):
        with pytest.raises(FeasibilityError):
            ks_growth_rate(10.0, mild_market)
        with pytest.raises(FeasibilityError):
            ks_growth_rate(-5.0, mild_market)


class TestOptimalFraction:
    def test_mild_market(self, mild_market):
        sol = ks_optimal_fraction(mild_market)
        assert sol.f_star == pytest.approx(0.2028985507246377, rel=1e-12)
        assert sol.growth == pytest.approx(0.0520004480708934, rel=1e-12)

    def test_wide_market(self, wide_market):
        assert ks_optimal_fraction(wide_market).f_star == pytest.approx(
            0.4019138755980861, rel=1e-12
        )

    def test_fair_game_has_no_edge(self):
        # dyadic parameters make E[X] == R exact, so f* is exactly zero
        mkt = MarketParams(u=1.5, d=0.75, p=0.5, R=1.125)
        assert ks_optimal_fraction(mkt).f_star == 0.0

    def test_first_order_condition_vanishes(self):
        rng = np.random.default_rng(5)
        for _ in range(300):
            mkt = random_admissible_market(rng)
            sol = ks_optimal_fraction(mkt)
            assert abs(ks_growth_derivative(sol.f_star, mkt)) <= 1e-10

    def test_no_random_fraction_beats_the_optimum(self):
        rng = np.random.default_rng(6)
        for _ in range(20):
            mkt = random_admissible_market(rng)
            sol = ks_optimal_fraction(mkt)
            lo, hi = ks_feasible_interval(mkt)
            width = hi - lo
            for f in rng.uniform(lo + 1e-6 * width, hi - 1e-6 * width, size=50):
                assert ks_growth_rate(float(f), mkt) <= sol.growth + 1e-12

    def test_midpoint_concavity(self):
        rng = np.random.default_rng(7)
        for _ in range(200):
            mkt = random_admissible_market(rng)
            lo, hi = ks_feasible_interval(mkt)
            width = hi - lo
            f1, f3 = np.sort(rng.uniform(lo + 1e-3 * width, hi - 1e-3 * width, size=2))
            f2 = 0.5 * (f1 + f3)
            mid = ks_growth_rate(float(f2), mkt)
            avg = 0.5 * (ks_growth_rate(float(f1), mkt) + ks_growth_rate(float(f3), mkt))
            assert mid >= avg - 1e-12


class TestConstrainedFraction:
    def test_interior_case(self, mild_market):
        # E[X/R] ~ 1.0317 and E[R/X] ~ 1.1375, both at least one
        sol = ks_constrained_fraction(mild_market)
        assert sol.f_star == pytest.approx(0.2028985507246377, rel=1e-12)

    def test_all_stock_case(self):
        # E[X/R] ~ 1.4167 > 1 and E[R/X] = 0.75 < 1
        mkt = MarketParams(u=1.5, d=2.0 / 3.0, p=0.9, R=1.0)
        assert ks_constrained_fraction(mkt).f_star == 1.0

    def test_all_bond_case(self):
        # E[X/R] = 0.75 < 1 and E[R/X] ~ 1.4167 > 1
        mkt = MarketParams(u=1.5, d=2.0 / 3.0, p=0.1, R=1.0)
        assert ks_constrained_fraction(mkt).f_star == 0.0

    def test_agrees_with_unconstrained_inside_unit_interval(self):
        rng = np.random.default_rng(8)
        checked = 0
        for _ in range(400):
            mkt = random_admissible_market(rng)
            unconstrained = ks_optimal_fraction(mkt).f_star
            if 0.0 <= unconstrained <= 1.0:
                assert ks_constrained_fraction(mkt).f_star == unconstrained
                checked += 1
        assert checked > 50

    def test_boundary_cases_stay_in_unit_interval(self):
        rng = np.random.default_rng(9)
        for _ in range(400):
            mkt = random_admissible_market(rng)
            assert 0.0 <= ks_constrained_fraction(mkt).f_star <= 1.0


class TestGridOracle:
    def test_matches_closed_form_mild(self, mild_market):
        assert ks_grid_oracle(mild_market, 1_000_000) == pytest.approx(
            0.2028985507246377, abs=1e-5
        )

    def test_matches_closed_form_wide(self, wide_market):
        assert ks_grid_oracle(wide_market, 1_000_000) == pytest.approx(
            0.4019138755980861, abs=1e-5
        )

    def test_fair_game_near_zero(self):
        mkt = MarketParams(u=1.5, d=0.75, p=0.5, R=1.125)
        lo, hi = ks_feasible_interval(mkt)
        spacing = (hi - lo) / (100_000 - 1)
        assert abs(ks_grid_oracle(mkt, 100_000)) <= spacing

    def test_agreement_on_random_draws(self):
        rng = np.random.default_rng(10)
        for _ in range(100):
            mkt = random_admissible_market(rng)
            lo, hi = ks_feasible_interval(mkt)
            spacing = (hi - lo) / (20_001 - 1)
            assert abs(ks_grid_oracle(mkt, 20_001) - ks_optimal_fraction(mkt).f_star) <= (
                2.0 * spacing
            )

    def test_resolution_validated(self, mild_market):
        from kellytree import ParameterError

        with pytest.raises(ParameterError):
            ks_grid_oracle(mild_market, 10)
