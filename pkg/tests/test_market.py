"""Tests for the rate model, fund variance aggregation, and closed-form prices."""

from __future__ import annotations

import math

import numpy as np
import pytest
from scipy.integrate import quad
from scipy.special import ndtr

from annuity_bounds import (
    ContractKind,
    ContractSpec,
    FundParams,
    InvalidParameter,
    MarketParams,
    NonPositiveFund,
    YieldCurveParams,
    check_gmdb_assumptions,
    deterministic_market,
    forward_rate,
    forward_rate0,
    mc_price,
    price_gmib_flow,
    price_max_payoff,
    sigma_y_sq,
    simulate_market_paths,
    theta,
    zcb_price,
)
from annuity_bounds.mc_oracle import McConfig


class TestYieldCurve:
    def test_short_end_is_b_plus_c(self, curve) -> None:
        assert forward_rate0(curve, 0.0) == pytest.approx(0.0095, abs=1e-15)

    def test_long_end_is_b(self, curve) -> None:
        assert forward_rate0(curve, 1e6) == pytest.approx(curve.b, abs=1e-12)

    def test_one_year_value(self, curve) -> None:
        # frozen from a direct scalar evaluation of b + c*e^-a + d*a*e^-a
        assert forward_rate0(curve, 1.0) == pytest.approx(
            0.020284748112595706, abs=1e-12
        )

    def test_integral_matches_quadrature(self, curve) -> None:
        for horizon in (0.5, 1.0, 5.0, 15.0):
            numeric, _ = quad(curve.forward, 0.0, horizon, limit=200)
            assert curve.integral(horizon) == pytest.approx(numeric, abs=1e-10)

    def test_slope_matches_difference_quotient(self, curve) -> None:
        h = 1e-6
        for t in (0.0, 1.0, 7.0):
            numeric = (curve.forward(t + h) - curve.forward(max(t - h, 0.0))) / (
                h if t == 0.0 else 2 * h
            )
            assert curve.forward_dt(t) == pytest.approx(numeric, abs=1e-6)

    def test_nonpositive_decay_rejected(self) -> None:
        with pytest.raises(InvalidParameter):
            YieldCurveParams(a=0.0, b=0.01, c=0.0, d=0.0)


class TestTheta:
    def test_time_zero_value(self, market) -> None:
        # slope/kappa + level: 0.015*(0.75-0.02)/0.1 + 0.0095 = 0.119; the
        # variance correction vanishes at time zero
        assert theta(market, 0.0) == pytest.approx(0.119, abs=1e-12)

    def test_flat_curve_fixed_point(self) -> None:
        mkt = deterministic_market(0.013, 0.2)
        for t in (0.0, 2.5, 40.0):
            assert theta(mkt, t) == pytest.approx(0.013, abs=1e-14)


class TestZcbPrice:
    def test_maturity_identity(self, market) -> None:
        for t in (0.0, 1.3, 9.0):
            assert zcb_price(market, 0.02, t, t) == pytest.approx(1.0, abs=1e-15)

    def test_deterministic_degeneration(self, curve) -> None:
        """Zero rate volatility and on-curve rate reproduce the curve discount."""
        mkt = MarketParams(
            kappa=0.1, sigma_r=0.0, sigma_s=0.2, rho=0.3, r0=0.0095, curve=curve
        )
        t, horizon = 2.0, 7.0
        expected = math.exp(-(curve.integral(horizon) - curve.integral(t)))
        assert zcb_price(mkt, float(curve.forward(t)), t, horizon) == pytest.approx(
            expected, rel=1e-12
        )

    def test_time_zero_matches_forward_integral(self, market, curve) -> None:
        numeric, _ = quad(curve.forward, 0.0, 5.0, limit=200)
        assert zcb_price(market, 0.0095, 0.0, 5.0) == pytest.approx(
            math.exp(-numeric), rel=1e-9
        )

    def test_in_unit_interval_for_positive_curve(self) -> None:
        mkt = deterministic_market(0.02, 0.2)
        for horizon in (0.5, 3.0, 20.0):
            price = zcb_price(mkt, 0.02, 0.0, horizon)
            assert 0.0 < price <= 1.0

    def test_decreasing_in_short_rate(self, market) -> None:
        rng = np.random.default_rng(3)
        for _ in range(5):
            t = float(rng.uniform(0.0, 4.0))
            horizon = t + float(rng.uniform(0.5, 10.0))
            r = float(rng.uniform(-0.01, 0.06))
            up = zcb_price(market, r + 1e-5, t, horizon)
            down = zcb_price(market, r - 1e-5, t, horizon)
            assert up < down


class TestForwardRate:
    def test_short_end_consistency(self, market) -> None:
        for t, r in ((0.0, 0.0095), (2.0, 0.03)):
            assert forward_rate(market, r, t, t) == pytest.approx(r, abs=1e-4)

    def test_deterministic_curve_recovered(self, curve) -> None:
        mkt = MarketParams(
            kappa=0.1, sigma_r=0.0, sigma_s=0.2, rho=0.3, r0=0.0095, curve=curve
        )
        t = 1.0
        for s in (1.0, 3.0, 10.0):
            assert forward_rate(mkt, float(curve.forward(t)), t, s) == pytest.approx(
                float(curve.forward(s)), abs=1e-6
            )

    def test_five_year_point(self, market) -> None:
        # frozen from a direct evaluation of the curve at 5y; notably above
        # the 3% guarantee rate used in the examples
        value = forward_rate(market, 0.0095, 0.0, 5.0)
        assert value == pytest.approx(0.06024044083255475, abs=1e-6)
        assert value > 0.03


class TestSigmaYSq:
    def test_empty_interval(self, market, fund) -> None:
        assert sigma_y_sq(market, fund, 3.0, 3.0) == 0.0

    def test_zero_rate_vol_is_linear(self, fund) -> None:
        mkt = deterministic_market(0.01, 0.2)
        for horizon in (0.5, 2.0, 7.0):
            expected = (fund.pi_s * 0.2) ** 2 * horizon
            assert sigma_y_sq(mkt, fund, 0.0, horizon) == pytest.approx(
                expected, rel=1e-12
            )

    def test_matches_simpson_oracle(self, market, fund) -> None:
        """Independent composite-Simpson quadrature at high resolution."""
        t, horizon = 0.0, 5.0
        rho_comp = math.sqrt(1.0 - market.rho**2)

        def integrand(s: np.ndarray) -> np.ndarray:
            duration = market.bond_duration(s, horizon)
            first = duration * market.sigma_r * market.rho + (
                fund.pi_s * market.sigma_s
                - fund.pi_p * market.rho * market.sigma_r * duration
            )
            second = duration * market.sigma_r * rho_comp * (1.0 - fund.pi_p)
            return first**2 + second**2

        grid = np.linspace(t, horizon, 10001)
        values = integrand(grid)
        h = grid[1] - grid[0]
        simpson = (h / 3.0) * (
            values[0]
            + values[-1]
            + 4.0 * values[1:-1:2].sum()
            + 2.0 * values[2:-1:2].sum()
        )
        assert sigma_y_sq(market, fund, t, horizon) == pytest.approx(
            float(simpson), rel=1e-8
        )


class TestPriceMaxPayoff:
    def test_degenerate_returns_max(self, curve) -> None:
        """No volatility reaching the claim: price is the larger leg."""
        mkt = MarketParams(
            kappa=0.1, sigma_r=0.0, sigma_s=0.2, rho=0.0, r0=0.01, curve=curve
        )
        still_fund = FundParams(initial_value=100.0, pi_s=0.0, pi_p=0.0)
        price = price_max_payoff(mkt, still_fund, 100.0, 0.01, 0.0, 5.0, 90.0)
        assert price == pytest.approx(
            max(100.0, 90.0 * zcb_price(mkt, 0.01, 0.0, 5.0)), rel=1e-12
        )

    def test_zero_guarantee_returns_fund(self, market, fund) -> None:
        assert price_max_payoff(market, fund, 100.0, 0.01, 0.0, 5.0, 0.0) == 100.0

    def test_rejects_nonpositive_fund(self, market, fund) -> None:
        with pytest.raises(NonPositiveFund):
            price_max_payoff(market, fund, 0.0, 0.01, 0.0, 5.0, 100.0)

    def test_monotone_in_guarantee(self, market, fund) -> None:
        previous = 0.0
        for guarantee in np.linspace(0.0, 200.0, 21):
            price = price_max_payoff(
                market, fund, 100.0, 0.01, 0.0, 5.0, float(guarantee)
            )
            assert price >= previous - 1e-12
            previous = price

    def test_monotone_in_stock_vol(self, curve, fund) -> None:
        previous = 0.0
        for sigma_s in (0.05, 0.1, 0.2, 0.3, 0.4):
            mkt = MarketParams(
                kappa=0.1, sigma_r=0.02, sigma_s=sigma_s, rho=0.3, r0=0.01, curve=curve
            )
            price = price_max_payoff(mkt, fund, 100.0, 0.01, 0.0, 5.0, 110.0)
            assert price >= previous - 1e-12
            previous = price

    def test_dominates_both_legs(self, market, fund) -> None:
        guarantee = 100.0 * math.exp(0.03 * 5.0)
        price = price_max_payoff(market, fund, 100.0, 0.01, 0.0, 5.0, guarantee)
        bond_leg = guarantee * zcb_price(market, 0.01, 0.0, 5.0)
        assert price >= max(100.0, bond_leg) - 1e-12
        assert price - bond_leg <= 100.0 + 1e-12

    def test_components_recombine(self, market, fund) -> None:
        """Rebuilding the formula from its pieces reproduces the price."""
        t, horizon, guarantee = 0.0, 5.0, 115.0
        bond = zcb_price(market, 0.01, t, horizon)
        sigma_y = math.sqrt(sigma_y_sq(market, fund, t, horizon))
        d2 = (math.log(guarantee * bond / 100.0) + 0.5 * sigma_y**2) / sigma_y
        d1 = d2 - sigma_y
        rebuilt = (
            guarantee * bond
            + 100.0 * ndtr(-d1)
            - guarantee * bond * ndtr(-d2)
        )
        assert price_max_payoff(
            market, fund, 100.0, 0.01, t, horizon, guarantee
        ) == pytest.approx(rebuilt, rel=1e-14)

    def test_against_monte_carlo(self, market, fund) -> None:
        spec = ContractSpec(ContractKind.GMAB, 0.03, 60, 0.0, 5.0)
        guarantee = spec.guarantee(100.0, 5.0)
        closed = price_max_payoff(market, fund, 100.0, market.r0, 0.0, 5.0, guarantee)
        paths = simulate_market_paths(
            market, fund, 5.0, McConfig(paths=100_000, seed=11, antithetic=True)
        )
        estimate = mc_price(spec, paths, lambda t, a: np.zeros(np.shape(a)))
        assert abs(estimate.mean - closed) <= 3.0 * estimate.stderr


class TestPriceGmibFlow:
    def test_zero_rate_reduces_to_call(self, market, fund) -> None:
        """Without the coupon the flow is a call struck at the initial value."""
        spec = ContractSpec(ContractKind.GMIB, 0.0, 60, 0.0, 5.0)
        s = 3.0
        flow = price_gmib_flow(market, fund, 100.0, 0.01, 0.0, s, spec)
        max_price = price_max_payoff(market, fund, 100.0, 0.01, 0.0, s, 100.0)
        bond = zcb_price(market, 0.01, 0.0, s)
        assert flow == pytest.approx(max_price - 100.0 * bond, rel=1e-12)

    def test_immediate_payment(self, market, fund) -> None:
        spec = ContractSpec(ContractKind.GMIB, 0.03, 60, 0.0, 5.0)
        assert price_gmib_flow(market, fund, 100.0, 0.01, 0.0, 0.0, spec) == (
            pytest.approx(100.0 * 0.03, rel=1e-12)
        )

    def test_against_monte_carlo(self, market, fund) -> None:
        spec = ContractSpec(ContractKind.GMIB, 0.03, 60, 0.0, 3.0)
        s = 3.0
        closed = price_gmib_flow(market, fund, 100.0, market.r0, 0.0, s, spec)
        paths = simulate_market_paths(
            market, fund, s, McConfig(paths=100_000, seed=12, antithetic=True)
        )
        level = spec.guarantee(100.0, s)
        discount = np.exp(-paths.discount_integral[:, -1])
        flow = 100.0 * 0.03 + np.maximum(paths.fund[:, -1] - level, 0.0)
        sampled = discount * flow
        stderr = float(np.std(sampled, ddof=1) / math.sqrt(len(sampled)))
        assert abs(float(np.mean(sampled)) - closed) <= 3.0 * stderr


class TestGmdbAssumptions:
    def test_alpha_vanishes_at_short_horizon(self, market) -> None:
        report = check_gmdb_assumptions(market, 0.01, 0.0, 1e-6, 0.03)
        assert report.alpha <= 0.0
        assert report.alpha == pytest.approx(0.0, abs=1e-5)

    def test_flat_low_curve_dominated(self) -> None:
        mkt = deterministic_market(0.01, 0.2)
        report = check_gmdb_assumptions(mkt, 0.01, 0.0, 5.0, 0.03)
        assert report.rg_dominates_forward
        assert report.ok == report.drift_condition

    def test_reference_curve_violates_at_long_end(self, market) -> None:
        report = check_gmdb_assumptions(market, 0.0095, 0.0, 5.0, 0.03)
        assert not report.rg_dominates_forward
        worst_s, excess = report.worst_violation
        assert worst_s == pytest.approx(5.0, abs=0.2)
        assert excess > 0.0


class TestContractSpec:
    def test_masks_follow_kind(self) -> None:
        spec = ContractSpec(ContractKind.GMDB, 0.03, 60, 0.0, 5.0)
        assert spec.payoff_masks.death
        assert not spec.payoff_masks.accumulation
        assert not spec.payoff_masks.income

    def test_guarantee_accrual(self) -> None:
        spec = ContractSpec(ContractKind.GMAB, 0.03, 60, 0.0, 5.0)
        assert spec.guarantee(100.0, 5.0) == pytest.approx(100.0 * math.exp(0.15))

    def test_invalid_window_rejected(self) -> None:
        with pytest.raises(InvalidParameter):
            ContractSpec(ContractKind.GMAB, 0.03, 60, 5.0, 5.0)
