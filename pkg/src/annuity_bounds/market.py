"""Rate-equity market model and closed-form guarantee prices.

The short rate mean-reverts around a drift calibrated to a parametric
instantaneous forward curve, the stock is lognormal, and the policyholder
fund mixes stock, a zero-coupon bond maturing with the contract, and cash
at fixed weights.  Prices of the max-of-fund-and-guarantee claim and of the
income-flow claim are available in closed form once the fund's aggregated
log variance is known; that variance is computed by quadrature of the
squared volatility loading of the fund relative to the maturity bond.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy.special import ndtr

from ._quad import panel_quad
from .errors import InvalidParameter, NonPositiveFund

__all__ = [
    "YieldCurveParams",
    "MarketParams",
    "FundParams",
    "ContractKind",
    "PayoffMasks",
    "ContractSpec",
    "GmdbAssumptionReport",
    "forward_rate0",
    "theta",
    "zcb_price",
    "forward_rate",
    "sigma_y_sq",
    "price_max_payoff",
    "price_gmib_flow",
    "check_gmdb_assumptions",
    "deterministic_market",
]


@dataclass(frozen=True)
class YieldCurveParams:
    """Parametric initial forward curve ``b + c*exp(-a t) + d*a*t*exp(-a t)``.

    ``a`` sets the decay speed, ``b`` the long rate, ``c`` the short-end
    spread over the long rate, and ``d`` weights a hump term.
    """

    a: float
    b: float
    c: float
    d: float

    def __post_init__(self):
        if self.a <= 0:
            raise InvalidParameter(f"curve decay a must be > 0, got {self.a}")

    def forward(self, t):
        decay = np.exp(-self.a * t)
        return self.b + self.c * decay + self.d * self.a * t * decay

    def forward_dt(self, t):
        """Time derivative of the initial forward curve (analytic)."""
        decay = np.exp(-self.a * t)
        return self.a * decay * (self.d - self.c - self.d * self.a * t)

    def integral(self, horizon: float) -> float:
        """``integral of forward(s) ds`` from 0 to ``horizon``, in closed form."""
        a = self.a
        decay = math.exp(-a * horizon)
        return (
            self.b * horizon
            + (self.c / a) * (1.0 - decay)
            + self.d * ((1.0 - decay) / a - horizon * decay)
        )


def forward_rate0(curve: YieldCurveParams, t: float) -> float:
    """Instantaneous forward rate observed at time 0 for horizon ``t``."""
    if t < 0:
        raise InvalidParameter(f"t must be >= 0, got {t}")
    return float(curve.forward(t))


@dataclass(frozen=True)
class MarketParams:
    """Mean-reverting short rate plus lognormal stock, correlated.

    Attributes
    ----------
    kappa : float
        Mean-reversion speed of the short rate, > 0.
    sigma_r : float
        Short-rate volatility, >= 0.
    sigma_s : float
        Stock volatility, > 0.
    rho : float
        Stock-rate correlation, in (-1, 1).
    r0 : float
        Initial short rate (a free initial condition; it need not equal the
        curve's time-0 forward rate).
    curve : YieldCurveParams
        Initial forward curve the rate drift is calibrated to.
    mu_s : float, optional
        Real-world stock drift; only the measure-change density depends on
        it.  ``None`` means "equal to the short rate", which makes the
        pricing and real-world measures coincide.
    """

    kappa: float
    sigma_r: float
    sigma_s: float
    rho: float
    r0: float
    curve: YieldCurveParams
    mu_s: float | None = None

    def __post_init__(self):
        if self.kappa <= 0:
            raise InvalidParameter(f"kappa must be > 0, got {self.kappa}")
        if self.sigma_s <= 0:
            raise InvalidParameter(f"sigma_s must be > 0, got {self.sigma_s}")
        if self.sigma_r < 0:
            raise InvalidParameter(f"sigma_r must be >= 0, got {self.sigma_r}")
        if not -1.0 < self.rho < 1.0:
            raise InvalidParameter(f"rho must lie in (-1, 1), got {self.rho}")

    def bond_duration(self, t, maturity):
        """``(1 - exp(-kappa*(maturity - t))) / kappa``."""
        return (1.0 - np.exp(-self.kappa * (maturity - t))) / self.kappa


def deterministic_market(r: float, sigma_s: float, kappa: float = 0.1) -> MarketParams:
    """Degenerate market with a flat deterministic rate ``r``.

    Used to compare PDE results (which assume a constant rate) against the
    closed-form prices: the curve is flat at ``r`` and the rate volatility is
    zero, so every discount factor is ``exp(-r * horizon)``.
    """
    curve = YieldCurveParams(a=0.01, b=r, c=0.0, d=0.0)
    return MarketParams(
        kappa=kappa, sigma_r=0.0, sigma_s=sigma_s, rho=0.0, r0=r, curve=curve
    )


def theta(mkt: MarketParams, t: float) -> float:
    """Mean-reversion target of the short rate at time ``t``.

    Combines the forward curve level, its slope scaled by the reversion
    speed, and a convexity correction proportional to the squared rate
    volatility.
    """
    if t < 0:
        raise InvalidParameter(f"t must be >= 0, got {t}")
    kappa = mkt.kappa
    convexity = (mkt.sigma_r**2) / (2.0 * kappa**2) * (1.0 - math.exp(-2.0 * kappa * t))
    return float(mkt.curve.forward_dt(t) / kappa + mkt.curve.forward(t) + convexity)


def _log_zcb(mkt: MarketParams, short_rate: float, t: float, maturity: float) -> float:
    # No range validation: forward_rate differentiates through this with a
    # small symmetric stencil that may step slightly outside [t, inf).
    duration = mkt.bond_duration(t, maturity)
    log_ratio = -mkt.curve.integral(maturity) + mkt.curve.integral(t)
    convexity = (
        (mkt.sigma_r**2)
        / (4.0 * mkt.kappa**3)
        * (1.0 - math.exp(-2.0 * mkt.kappa * t))
        * duration**2
    )
    return (
        -duration * short_rate
        + log_ratio
        + duration * float(mkt.curve.forward(t))
        - convexity
    )


def zcb_price(mkt: MarketParams, short_rate: float, t: float, maturity: float) -> float:
    """Zero-coupon bond price at time ``t`` for unit notional at ``maturity``.

    Affine in the current short rate; reproduces the initial curve when the
    short rate sits on it, and equals 1 at ``t == maturity``.
    """
    if not 0 <= t <= maturity:
        raise InvalidParameter(f"require 0 <= t <= maturity, got t={t}, T={maturity}")
    return math.exp(_log_zcb(mkt, short_rate, t, maturity))


def forward_rate(
    mkt: MarketParams, short_rate: float, t: float, s: float, step: float = 1e-5
) -> float:
    """Instantaneous forward rate at ``t`` for horizon ``s``.

    Central finite difference of the log bond price in the maturity
    argument; one code path for every parameter combination.
    """
    if s < t:
        raise InvalidParameter(f"require s >= t, got t={t}, s={s}")
    up = _log_zcb(mkt, short_rate, t, s + step)
    down = _log_zcb(mkt, short_rate, t, s - step)
    return -(up - down) / (2.0 * step)


def sigma_y_sq(
    mkt: MarketParams,
    fund: "FundParams",
    t: float,
    maturity: float,
    rel_tol: float = 1e-10,
    order: int = 64,
    max_doublings: int = 6,
) -> float:
    """Aggregated log variance of the fund relative to the maturity bond.

    Integrates the squared norm of the combined volatility loading (bond
    duration times rate volatility plus the fund's stock/bond mix) over
    ``[t, maturity]`` by per-year Gauss-Legendre panels, doubling the order
    until the total changes by less than ``rel_tol``.
    """
    if maturity < t:
        raise InvalidParameter(f"require maturity >= t, got t={t}, T={maturity}")
    if maturity == t:
        return 0.0
    rho_comp = math.sqrt(1.0 - mkt.rho**2)
    pi_s, pi_p = fund.pi_s, fund.pi_p

    def integrand(s):
        duration = mkt.bond_duration(s, maturity)
        # volatility loading of fund / maturity-bond, both components of the
        # driving two-dimensional noise
        first = duration * mkt.sigma_r * mkt.rho + (
            pi_s * mkt.sigma_s - pi_p * mkt.rho * mkt.sigma_r * duration
        )
        second = duration * mkt.sigma_r * rho_comp - pi_p * rho_comp * mkt.sigma_r * duration
        return first * first + second * second

    knots = [t + k for k in range(int(math.ceil(maturity - t)))] + [maturity]

    def total(n: int) -> float:
        return sum(panel_quad(integrand, a, b, n) for a, b in zip(knots[:-1], knots[1:]))

    previous = total(order)
    n = order
    for _ in range(max_doublings):
        n *= 2
        current = total(n)
        if abs(current - previous) <= rel_tol * max(1.0, abs(current)):
            return current
        previous = current
    return previous


_DEGENERATE_SIGMA = 1e-9  # sigma_y below this treats the claim as deterministic


def _black_call(fund_value: float, strike_pv: float, sigma_y: float) -> float:
    """Price of ``(A_s - K)_+`` given the present value of the strike."""
    if strike_pv <= 0.0:
        return fund_value
    if sigma_y < _DEGENERATE_SIGMA:
        return max(fund_value - strike_pv, 0.0)
    d2 = (math.log(strike_pv / fund_value) + 0.5 * sigma_y * sigma_y) / sigma_y
    d1 = d2 - sigma_y
    return fund_value * float(ndtr(-d1)) - strike_pv * float(ndtr(-d2))


def price_max_payoff(
    mkt: MarketParams,
    fund: "FundParams",
    fund_value: float,
    short_rate: float,
    t: float,
    maturity: float,
    guarantee: float,
) -> float:
    """Price at ``t`` of ``max(A_maturity, guarantee)`` paid at ``maturity``.

    Guaranteed leg plus an exchange option on the fund; degenerates to
    ``max(fund_value, guarantee * bond)`` when the aggregated volatility
    vanishes.  Always at least the larger of the fund and the discounted
    guarantee.
    """
    if fund_value <= 0:
        raise NonPositiveFund(f"fund value must be > 0, got {fund_value}")
    if guarantee < 0:
        raise InvalidParameter(f"guarantee must be >= 0, got {guarantee}")
    bond = zcb_price(mkt, short_rate, t, maturity)
    sigma_y = math.sqrt(sigma_y_sq(mkt, fund, t, maturity))
    return guarantee * bond + _black_call(fund_value, guarantee * bond, sigma_y)


def price_gmib_flow(
    mkt: MarketParams,
    fund: "FundParams",
    fund_value: float,
    short_rate: float,
    t: float,
    s: float,
    spec: "ContractSpec",
) -> float:
    """Price at ``t`` of the income flow paid at ``s``: guaranteed coupon on
    the initial investment plus the excess of the fund over the accrued
    guarantee level."""
    if fund_value <= 0:
        raise NonPositiveFund(f"fund value must be > 0, got {fund_value}")
    if s < t:
        raise InvalidParameter(f"require s >= t, got t={t}, s={s}")
    bond = zcb_price(mkt, short_rate, t, s)
    level = spec.guarantee(fund.initial_value, s)
    sigma_y = math.sqrt(sigma_y_sq(mkt, fund, t, s))
    return fund.initial_value * spec.guarantee_rate * bond + _black_call(
        fund_value, level * bond, sigma_y
    )


@dataclass(frozen=True)
class GmdbAssumptionReport:
    """Diagnostics for the closed-form death-benefit bound preconditions.

    ``worst_violation`` is ``(s, forward(t, s) - guarantee_rate)`` at the
    grid point with the largest excess; a negative value means the guarantee
    rate dominates the whole forward curve (no violation).
    """

    rg_dominates_forward: bool
    drift_condition: bool
    worst_violation: tuple[float, float]
    alpha: float

    @property
    def ok(self) -> bool:
        return self.rg_dominates_forward and self.drift_condition


def check_gmdb_assumptions(
    mkt: MarketParams,
    short_rate: float,
    t: float,
    maturity: float,
    guarantee_rate: float,
    grid_step: float = 0.01,
) -> GmdbAssumptionReport:
    """Evaluate the two preconditions of the closed-form death-benefit bounds.

    Checks ``guarantee_rate >= forward(t, s)`` on a fine maturity grid and
    the drift condition ``r*alpha - theta(t)*(alpha + (maturity - t)) <= 0``
    with ``alpha = (exp(-kappa*(maturity - t)) - 1) / kappa``.  Reports,
    never raises.
    """
    if not t < maturity:
        raise InvalidParameter(f"require t < maturity, got t={t}, T={maturity}")
    steps = max(1, int(round((maturity - t) / grid_step)))
    grid = np.linspace(t, maturity, steps + 1)
    excess = np.array(
        [forward_rate(mkt, short_rate, t, float(s)) - guarantee_rate for s in grid]
    )
    worst = int(np.argmax(excess))
    alpha = (math.exp(-mkt.kappa * (maturity - t)) - 1.0) / mkt.kappa
    assert alpha <= 1e-15, "alpha is nonpositive by construction"
    drift_ok = short_rate * alpha - theta(mkt, t) * (alpha + (maturity - t)) <= 0.0
    return GmdbAssumptionReport(
        rg_dominates_forward=bool(excess[worst] <= 0.0),
        drift_condition=bool(drift_ok),
        worst_violation=(float(grid[worst]), float(excess[worst])),
        alpha=alpha,
    )


@dataclass(frozen=True)
class FundParams:
    """Constant-mix policyholder fund: stock, maturity bond, and cash weights."""

    initial_value: float
    pi_s: float
    pi_p: float

    def __post_init__(self):
        if self.initial_value <= 0:
            raise InvalidParameter(
                f"initial fund value must be > 0, got {self.initial_value}"
            )
        if not (0.0 <= self.pi_s <= 1.0 and 0.0 <= self.pi_p <= 1.0):
            raise InvalidParameter("portfolio weights must lie in [0, 1]")
        if self.pi_s + self.pi_p > 1.0 + 1e-12:
            raise InvalidParameter("stock and bond weights must sum to at most 1")


class ContractKind(Enum):
    GMAB = "gmab"
    GMIB = "gmib"
    GMDB = "gmdb"
    COMBINED = "combined"


@dataclass(frozen=True)
class PayoffMasks:
    """Which payoff legs are active: terminal max payoff, income flow, death benefit."""

    accumulation: bool
    income: bool
    death: bool


_KIND_MASKS = {
    ContractKind.GMAB: PayoffMasks(True, False, False),
    ContractKind.GMIB: PayoffMasks(False, True, False),
    ContractKind.GMDB: PayoffMasks(False, False, True),
    ContractKind.COMBINED: PayoffMasks(True, True, True),
}


@dataclass(frozen=True)
class ContractSpec:
    """Product definition: kind, guarantee accrual, age, and time window.

    Guarantee levels grow from the initial investment at ``guarantee_rate``
    compounded continuously from time 0.  ``masks`` overrides the per-kind
    default legs (useful for combined products and diagnostics).
    """

    kind: ContractKind
    guarantee_rate: float
    age: int
    valuation_time: float
    maturity: float
    masks: PayoffMasks | None = None

    def __post_init__(self):
        if not 0 <= self.valuation_time < self.maturity:
            raise InvalidParameter(
                f"require 0 <= valuation_time < maturity, got "
                f"{self.valuation_time}, {self.maturity}"
            )
        if self.guarantee_rate < 0:
            raise InvalidParameter(
                f"guarantee_rate must be >= 0, got {self.guarantee_rate}"
            )
        if self.age < 0:
            raise InvalidParameter(f"age must be >= 0, got {self.age}")

    @property
    def payoff_masks(self) -> PayoffMasks:
        if self.masks is not None:
            return self.masks
        return _KIND_MASKS[self.kind]

    def guarantee(self, initial_value: float, s: float) -> float:
        """Guarantee level at time ``s`` for a fund started at ``initial_value``."""
        return initial_value * math.exp(self.guarantee_rate * s)
