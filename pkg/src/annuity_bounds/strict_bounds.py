"""Extremal contract values when every mortality path must reproduce the table.

Under pathwise consistency with the one-year survival probabilities, the
extremal mortality controls are deterministic: all mortality mass in a year
is released either at the year end (maximizing value for income and death
benefits) or immediately after the year start (the infimum, which is
approached but not attained).  The induced survival curves are step
functions constant between integer ages, so every bound reduces to sums and
one-dimensional integrals of closed-form prices.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from ._quad import piecewise_quad, year_knots
from .errors import AgeOutOfRange, InvalidParameter
from .lifetable import AnnualSurvival, FaaKind, faa_hazard, faa_survival
from .market import (
    ContractKind,
    ContractSpec,
    FundParams,
    GmdbAssumptionReport,
    MarketParams,
    check_gmdb_assumptions,
    price_gmib_flow,
    price_max_payoff,
)

__all__ = [
    "StepDirection",
    "InterventionSchedule",
    "StrictBounds",
    "step_survival",
    "gmab_bounds",
    "gmib_bounds",
    "gmdb_bounds",
    "faa_baseline_price",
]


class StepDirection(Enum):
    """Which extremal step-survival curve to evaluate."""

    SUP = "sup"
    INF = "inf"


@dataclass(frozen=True)
class InterventionSchedule:
    """Deterministic mortality jumps ``(time, mass)`` attaining an upper bound."""

    times: tuple[float, ...]
    jumps: tuple[float, ...]

    def __post_init__(self):
        if len(self.times) != len(self.jumps):
            raise InvalidParameter("times and jumps must have equal length")
        for earlier, later in zip(self.times[:-1], self.times[1:]):
            if later <= earlier:
                raise InvalidParameter("intervention times must be strictly increasing")
        for mass in self.jumps:
            if not 0.0 <= mass <= 1.0:
                raise InvalidParameter(f"jump mass must lie in [0, 1], got {mass}")

    def __len__(self) -> int:
        return len(self.times)


_LOWER_NOTE = (
    "infimum approached by releasing each year's mortality mass immediately "
    "after the year start; no admissible minimizer exists"
)


@dataclass(frozen=True)
class StrictBounds:
    """Upper/lower values with the schedule attaining the upper bound."""

    lower: float
    upper: float
    upper_schedule: InterventionSchedule
    lower_schedule_note: str = _LOWER_NOTE
    assumption_report: GmdbAssumptionReport | None = None
    assumptions_violated: bool = False

    def __post_init__(self):
        if self.lower > self.upper + 1e-9 * max(1.0, abs(self.upper)):
            raise InvalidParameter(
                f"lower bound {self.lower} exceeds upper bound {self.upper}"
            )


def step_survival(
    p: AnnualSurvival, direction: StepDirection, t: float, s: float
) -> float:
    """Extremal step survival from ``t`` to ``s``.

    SUP multiplies the annual probabilities whose year END falls at or
    before ``s`` (mass released at year ends); INF multiplies those whose
    year START falls strictly before ``s`` (mass released right after year
    starts).  Empty products are 1.  Years are counted from the first
    integer at or after ``t``; the stub periods before it and after the last
    whole year carry no mortality.
    """
    if s < t:
        raise InvalidParameter(f"require s >= t, got t={t}, s={s}")
    anchor = math.ceil(t)
    value = 1.0
    for j in range(p.n):
        if direction is StepDirection.SUP:
            include = anchor + j + 1 <= s
        else:
            include = anchor + j < s
        if not include:
            break
        value *= p.probs[j]
    return value


def _covered_years(spec: ContractSpec) -> int:
    return int(math.floor(spec.maturity)) - int(math.ceil(spec.valuation_time))


def _sliced(p: AnnualSurvival, spec: ContractSpec) -> AnnualSurvival:
    years = _covered_years(spec)
    if p.n < years:
        raise AgeOutOfRange(
            f"survival curve covers {p.n} years, contract needs {years}"
        )
    return p.truncated(years)


def _require_kind(spec: ContractSpec, kind: ContractKind) -> None:
    if spec.kind is not kind:
        raise InvalidParameter(f"expected a {kind.value} contract, got {spec.kind.value}")


def _upper_schedule(p: AnnualSurvival, anchor: int) -> InterventionSchedule:
    return InterventionSchedule(
        times=tuple(float(anchor + j + 1) for j in range(p.n)),
        jumps=tuple(1.0 - prob for prob in p.probs),
    )


def gmab_bounds(
    spec: ContractSpec,
    mkt: MarketParams,
    fund: FundParams,
    p: AnnualSurvival,
    short_rate: float,
    fund_value: float,
) -> StrictBounds:
    """Bounds for the accumulation benefit: upper equals lower.

    The terminal payoff only sees the total survival over the covered whole
    years, which every admissible mortality path reproduces, so all controls
    give the same value and the schedule is empty.
    """
    _require_kind(spec, ContractKind.GMAB)
    p = _sliced(p, spec)
    survival = p.cumulative(p.n)
    price = price_max_payoff(
        mkt,
        fund,
        fund_value,
        short_rate,
        spec.valuation_time,
        spec.maturity,
        spec.guarantee(fund.initial_value, spec.maturity),
    )
    value = survival * price
    return StrictBounds(
        lower=value,
        upper=value,
        upper_schedule=InterventionSchedule((), ()),
        lower_schedule_note="all admissible mortality paths give the same value",
    )


def gmib_bounds(
    spec: ContractSpec,
    mkt: MarketParams,
    fund: FundParams,
    p: AnnualSurvival,
    short_rate: float,
    fund_value: float,
    order: int = 32,
    rel_tol: float = 1e-9,
) -> StrictBounds:
    """Bounds for the income benefit.

    Both bounds integrate the income-flow price against a step survival
    curve; the curves are constant between integer ages, so the integral
    splits there and each panel needs a single price integral shared by the
    two bounds.
    """
    _require_kind(spec, ContractKind.GMIB)
    p = _sliced(p, spec)
    t = spec.valuation_time
    anchor = math.ceil(t)
    upper = 0.0
    lower = 0.0
    knots = year_knots(t, spec.maturity)
    for a, b in zip(knots[:-1], knots[1:]):
        mid = 0.5 * (a + b)
        sup_weight = step_survival(p, StepDirection.SUP, t, mid)
        inf_weight = step_survival(p, StepDirection.INF, t, mid)

        def flow_price(values):
            return np.array(
                [
                    price_gmib_flow(mkt, fund, fund_value, short_rate, t, float(s), spec)
                    for s in np.atleast_1d(values)
                ]
            )

        panel = piecewise_quad(flow_price, [a, b], order=order, rel_tol=rel_tol)
        upper += sup_weight * panel
        lower += inf_weight * panel
    return StrictBounds(lower=lower, upper=upper, upper_schedule=_upper_schedule(p, anchor))


def gmdb_bounds(
    spec: ContractSpec,
    mkt: MarketParams,
    fund: FundParams,
    p: AnnualSurvival,
    short_rate: float,
    fund_value: float,
) -> StrictBounds:
    """Bounds for the death benefit, priced at the extremal death times.

    The upper bound pays the max-payoff claim at each year end, the lower
    bound at each year start (a limit, not attained), both weighted by the
    probability of first death in that year.  The closed-form preconditions
    are evaluated and attached; when they fail the formulas are still
    reported but flagged, since the extremal death time inside a year is
    then no longer a year boundary.
    """
    _require_kind(spec, ContractKind.GMDB)
    p = _sliced(p, spec)
    t = spec.valuation_time
    anchor = math.ceil(t)
    report = check_gmdb_assumptions(
        mkt, short_rate, t, spec.maturity, spec.guarantee_rate
    )
    upper = 0.0
    lower = 0.0
    alive = 1.0
    for j in range(p.n):
        death_mass = (1.0 - p.probs[j]) * alive
        for target, s in ((True, anchor + j + 1), (False, anchor + j)):
            price = price_max_payoff(
                mkt,
                fund,
                fund_value,
                short_rate,
                t,
                float(s),
                spec.guarantee(fund.initial_value, float(s)),
            )
            if target:
                upper += death_mass * price
            else:
                lower += death_mass * price
        alive *= p.probs[j]
    return StrictBounds(
        lower=lower,
        upper=upper,
        upper_schedule=_upper_schedule(p, anchor),
        assumption_report=report,
        assumptions_violated=not report.ok,
    )


def faa_baseline_price(
    spec: ContractSpec,
    mkt: MarketParams,
    fund: FundParams,
    p: AnnualSurvival,
    kind: FaaKind,
    short_rate: float,
    fund_value: float,
    order: int = 32,
    rel_tol: float = 1e-9,
) -> float:
    """Contract price under a single fractional-age assumption.

    Accumulation: survival to maturity times the terminal price.  Income:
    integral of the survival curve against the flow price.  Death: integral
    of the survival curve times the hazard against the death-benefit price.
    Combined products sum the legs enabled by the payoff masks.  Survival is
    fixed to 1 on the stub before the first integer age.
    """
    masks = spec.payoff_masks
    t = spec.valuation_time
    anchor = math.ceil(t)

    def survival(s: float) -> float:
        return 1.0 if s <= anchor else faa_survival(p, kind, s - anchor)

    def hazard(s: float) -> float:
        return 0.0 if s < anchor else faa_hazard(p, kind, s - anchor)

    total = 0.0
    if masks.accumulation:
        total += survival(spec.maturity) * price_max_payoff(
            mkt,
            fund,
            fund_value,
            short_rate,
            t,
            spec.maturity,
            spec.guarantee(fund.initial_value, spec.maturity),
        )
    if masks.income:

        def income_integrand(values):
            return np.array(
                [
                    survival(float(s))
                    * price_gmib_flow(mkt, fund, fund_value, short_rate, t, float(s), spec)
                    for s in np.atleast_1d(values)
                ]
            )

        total += piecewise_quad(
            income_integrand, year_knots(t, spec.maturity), order=order, rel_tol=rel_tol
        )
    if masks.death:

        def death_integrand(values):
            return np.array(
                [
                    survival(float(s))
                    * hazard(float(s))
                    * price_max_payoff(
                        mkt,
                        fund,
                        fund_value,
                        short_rate,
                        t,
                        float(s),
                        spec.guarantee(fund.initial_value, float(s)),
                    )
                    for s in np.atleast_1d(values)
                ]
            )

        total += piecewise_quad(
            death_integrand, year_knots(t, spec.maturity), order=order, rel_tol=rel_tol
        )
    return total
