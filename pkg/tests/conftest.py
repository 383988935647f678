"""Shared fixtures: the bundled synthetic table and the reference market."""

from __future__ import annotations

import math
from pathlib import Path

import pytest

from annuity_bounds import (
    FundParams,
    MarketParams,
    YieldCurveParams,
    annual_survival_probs,
    deterministic_market,
    parse_life_table,
)

DATA_DIR = Path(__file__).resolve().parent.parent / "data"
CONFIG_DIR = Path(__file__).resolve().parent.parent / "configs"

REDUCED_RATE = 0.01


@pytest.fixture(scope="session")
def table():
    """Bundled synthetic table (ages 40..100), via the CSV parser."""
    return parse_life_table((DATA_DIR / "makeham_female_synthetic.csv").read_text())


@pytest.fixture(scope="session")
def curve() -> YieldCurveParams:
    return YieldCurveParams(a=0.015, b=-0.0105, c=0.02, d=0.75)


@pytest.fixture(scope="session")
def market(curve) -> MarketParams:
    return MarketParams(
        kappa=0.1, sigma_r=0.02, sigma_s=0.2, rho=0.3, r0=0.01, curve=curve
    )


@pytest.fixture(scope="session")
def fund() -> FundParams:
    return FundParams(initial_value=100.0, pi_s=0.6, pi_p=0.2)


@pytest.fixture(scope="session")
def reduced_market() -> MarketParams:
    """Flat deterministic-rate market matching the PDE engine's assumptions."""
    return deterministic_market(REDUCED_RATE, 0.2)


@pytest.fixture(scope="session")
def survival_at(table):
    """Factory: annual survival curve for (age, years) from the bundled table."""

    def factory(age: int, years: int):
        return annual_survival_probs(table, age, years)

    return factory


def sigma_a_of(fund: FundParams, market: MarketParams) -> float:
    """Effective fund volatility in the reduced setting."""
    return fund.pi_s * market.sigma_s
