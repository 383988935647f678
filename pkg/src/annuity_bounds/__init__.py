"""Robust valuation of variable annuity guarantees under life-table constraints.

Computes worst- and best-case prices of accumulation, income, and death
benefits over every mortality intensity consistent with a life table at
integer ages: pathwise-consistent bounds in closed form, and
expectation-consistent bounds via a constrained control problem solved by
finite differences with dual multiplier optimization.
"""

from .errors import (
    AgeOutOfRange,
    AnnuityBoundsError,
    ConfigInvalid,
    DualNotConverged,
    GridMismatch,
    GridTooCoarse,
    HorizonExceeded,
    InconsistentGrid,
    IncreasingCount,
    InvalidParameter,
    LifeTableParseError,
    MissingHeader,
    NonConsecutiveAges,
    NonIntegerMaturity,
    NonPositiveCount,
    NonPositiveFund,
    SolverFailure,
)
from .lifetable import (
    AnnualSurvival,
    FaaKind,
    LifeTable,
    annual_survival_probs,
    faa_hazard,
    faa_survival,
    make_makeham_table,
    parse_life_table,
)
from .market import (
    ContractKind,
    ContractSpec,
    FundParams,
    GmdbAssumptionReport,
    MarketParams,
    PayoffMasks,
    YieldCurveParams,
    check_gmdb_assumptions,
    deterministic_market,
    forward_rate,
    forward_rate0,
    price_gmib_flow,
    price_max_payoff,
    sigma_y_sq,
    theta,
    zcb_price,
)
from .mc_oracle import (
    BoundAuditReport,
    McConfig,
    McEstimate,
    PathSet,
    faa_hazard_policy,
    mc_price,
    simulate_market_paths,
    verify_bounds,
)
from .relaxed_hjb import (
    DeltaSweepPoint,
    Direction,
    GridSpec,
    HazardBand,
    HjbConfig,
    LambdaVector,
    RelaxedBounds,
    ValueSurface,
    bang_bang_control,
    constraint_survival,
    delta_sweep,
    hjb_solve,
    optimize_lambda,
)
from .strict_bounds import (
    InterventionSchedule,
    StepDirection,
    StrictBounds,
    faa_baseline_price,
    gmab_bounds,
    gmdb_bounds,
    gmib_bounds,
    step_survival,
)

__version__ = "0.1.0"
