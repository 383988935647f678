"""Expectation-constrained price bounds via dynamic programming.

Mortality intensities are confined to a band around a baseline curve that
reproduces the life table, and must match the tabulated multi-year survival
probabilities in expectation at selected integer horizons.  The worst- and
best-case prices of a combined guarantee (terminal max payoff, income flow,
death benefit) are obtained in two layers:

* an inner control problem over banded intensities, solved as a nonlinear
  parabolic PDE in time and log-fund value.  The optimal intensity is
  bang-bang: it sits on the band edge selected by the sign of the death
  benefit minus the continuation value, so each backward step is a small
  policy iteration around a tridiagonal solve (Crank-Nicolson in time with
  an implicit restart after every value discontinuity);
* an outer optimization over one multiplier per constrained horizon.  The
  dual objective is convex, its gradient is the gap between the tabulated
  and the model-implied survival probabilities, and the implied survival is
  computed by a companion linear PDE on the same grid so gradients are
  deterministic.

Everything here works in the reduced setting with a deterministic short
rate: the fund is the only diffusive state and discounting is exponential.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from enum import Enum
from typing import Sequence

import numpy as np
from scipy.linalg import solve_banded
from scipy.optimize import minimize

from .errors import (
    AgeOutOfRange,
    DualNotConverged,
    GridMismatch,
    GridTooCoarse,
    InvalidParameter,
    NonIntegerMaturity,
)
from .lifetable import AnnualSurvival, FaaKind, _within_year_hazard, faa_hazard
from .market import ContractSpec, FundParams, MarketParams, PayoffMasks

__all__ = [
    "Direction",
    "HazardBand",
    "GridSpec",
    "HjbConfig",
    "LambdaVector",
    "ValueSurface",
    "RelaxedBounds",
    "DeltaSweepPoint",
    "bang_bang_control",
    "hjb_solve",
    "constraint_survival",
    "optimize_lambda",
    "delta_sweep",
]


class Direction(Enum):
    """Which extremal price the control problem targets."""

    WORST = "worst"
    BEST = "best"


@dataclass(frozen=True)
class HazardBand:
    """Admissible intensity band around a fractional-age baseline.

    The baseline hazard comes from ``kind`` applied to ``survival``, so its
    integral over each whole year equals minus the log of that year's
    tabulated survival probability.  At width ``delta`` the admissible
    intensities at time ``t`` lie in ``[(baseline(t) - delta)+,
    baseline(t) + delta]``.
    """

    survival: AnnualSurvival
    kind: FaaKind
    delta: float

    def __post_init__(self):
        if self.delta < 0:
            raise InvalidParameter(f"delta must be >= 0, got {self.delta}")

    def baseline(self, t: float) -> float:
        """Baseline intensity at ``t`` (right-continuous at integers)."""
        return faa_hazard(self.survival, self.kind, t)

    def baseline_in_year(self, year: int, offset: float) -> float:
        """Baseline intensity inside ``year`` at elapsed fraction ``offset``.

        ``offset == 1`` evaluates the left limit at the year end, which the
        time stepper needs when a step's endpoint lands on a year boundary.
        """
        return _within_year_hazard(self.survival.probs[year], self.kind, offset)

    def edges_in_year(self, year: int, offset: float) -> tuple[float, float]:
        base = self.baseline_in_year(year, offset)
        return max(base - self.delta, 0.0), base + self.delta


def bang_bang_control(
    death_value: float,
    continuation_value: float,
    baseline_hazard: float,
    delta: float,
    direction: Direction,
) -> float:
    """Optimal intensity at one state: a band edge chosen by a comparison.

    Worst case: releasing mortality is only profitable where the death
    benefit is worth at least the continuation value, so the intensity sits
    at the upper edge there (ties included) and at the lower edge elsewhere.
    Best case: the branches swap.  A zero-width band returns the baseline.
    """
    if delta < 0 or baseline_hazard < 0:
        raise InvalidParameter("delta and baseline_hazard must be >= 0")
    low = max(baseline_hazard - delta, 0.0)
    high = baseline_hazard + delta
    if direction is Direction.WORST:
        return high if death_value >= continuation_value else low
    return high if death_value <= continuation_value else low


def _bang_bang_grid(
    death_values: np.ndarray,
    values: np.ndarray,
    low: float,
    high: float,
    worst: bool,
) -> np.ndarray:
    if worst:
        return np.where(death_values >= values, high, low)
    return np.where(death_values <= values, high, low)


@dataclass(frozen=True)
class GridSpec:
    """Uniform grid in log-fund value and per-year time steps."""

    x_min: float
    x_max: float
    nx: int = 401
    nt_per_year: int = 64

    def __post_init__(self):
        if self.nx < 3:
            raise InvalidParameter(f"nx must be >= 3, got {self.nx}")
        if self.nt_per_year < 1:
            raise InvalidParameter(f"nt_per_year must be >= 1, got {self.nt_per_year}")
        if not self.x_min < self.x_max:
            raise InvalidParameter("x_min must be smaller than x_max")

    @staticmethod
    def centered(
        x0: float,
        sigma_a: float,
        horizon: float,
        width: float = 6.0,
        nx: int = 401,
        nt_per_year: int = 64,
    ) -> "GridSpec":
        """Grid of ``width`` standard deviations either side of ``x0``."""
        half = max(width * sigma_a * math.sqrt(max(horizon, 1e-12)), 1e-3)
        return GridSpec(x0 - half, x0 + half, nx=nx, nt_per_year=nt_per_year)


@dataclass(frozen=True)
class HjbConfig:
    """Solver configuration for the reduced two-state setting.

    ``n`` is the integer horizon in years, ``r`` the deterministic short
    rate, and ``sigma_a`` the effective fund volatility (stock weight times
    stock volatility in the reduced setting).  ``constraint_times`` lists
    the integer horizons whose survival probabilities are enforced in
    expectation; multipliers at other horizons stay at zero.
    """

    n: int
    r: float
    sigma_a: float
    grid: GridSpec
    constraint_times: tuple[int, ...]
    direction: Direction
    masks: PayoffMasks | None = None
    policy_max_iter: int = 50
    policy_tol: float = 1e-10
    policy_damping: float = 1.0

    def __post_init__(self):
        if self.n < 1:
            raise InvalidParameter(f"horizon n must be >= 1, got {self.n}")
        if self.sigma_a < 0:
            raise InvalidParameter(f"sigma_a must be >= 0, got {self.sigma_a}")
        times = tuple(sorted(set(self.constraint_times)))
        if not times:
            raise InvalidParameter("constraint_times must be nonempty")
        if times[0] < 1 or times[-1] > self.n:
            raise InvalidParameter(
                f"constraint times must lie in 1..{self.n}, got {times}"
            )
        object.__setattr__(self, "constraint_times", times)
        if not 0.0 < self.policy_damping <= 1.0:
            raise InvalidParameter("policy_damping must lie in (0, 1]")


@dataclass(frozen=True)
class LambdaVector:
    """One multiplier per integer horizon ``1..n`` (zero where inactive)."""

    values: tuple[float, ...]

    def __post_init__(self):
        for v in self.values:
            if not math.isfinite(v):
                raise InvalidParameter("multipliers must be finite")

    @staticmethod
    def zeros(n: int) -> "LambdaVector":
        return LambdaVector((0.0,) * n)

    @staticmethod
    def from_active(n: int, times: Sequence[int], values: Sequence[float]) -> "LambdaVector":
        full = [0.0] * n
        for j, v in zip(times, values):
            full[j - 1] = float(v)
        return LambdaVector(tuple(full))

    def value_at(self, horizon: int) -> float:
        return self.values[horizon - 1]


@dataclass(frozen=True)
class ValueSurface:
    """Backward solution on the full time-space grid.

    ``values`` rows are right-continuous at constraint times: the row at an
    interior horizon ``j`` stores the continuation value from above, and
    ``jump_sizes[j]`` is the amount subtracted from it to obtain the value
    used below ``j``.  ``policy`` rows hold the optimal intensity evaluated
    with each year's own within-year baseline; ``policy_left[j]`` is the
    intensity at horizon ``j`` as seen from the year below (left limit of
    the baseline and post-jump value), which the companion survival solver
    uses at year boundaries.
    """

    times: np.ndarray
    x: np.ndarray
    values: np.ndarray
    policy: np.ndarray
    jump_sizes: dict[int, float]
    policy_left: dict[int, np.ndarray]
    x0: float

    def initial_value(self, x: float | None = None) -> float:
        """Value at time 0 and log-fund ``x`` (defaults to the start state)."""
        target = self.x0 if x is None else x
        return float(np.interp(target, self.x, self.values[0]))


class _Operator1D:
    """Tridiagonal drift-diffusion-decay operator with far-field linearity.

    Interior nodes use central differences; the boundary rows drop the
    curvature term and take one-sided first derivatives, which is exact for
    the asymptotically linear value functions priced here.
    """

    def __init__(self, nx: int, dx: float, drift: float, diffusion_sq: float, decay: float):
        lower = np.zeros(nx)
        diagonal = np.zeros(nx)
        upper = np.zeros(nx)
        half_diffusion = diffusion_sq / (2.0 * dx * dx)
        advection = drift / (2.0 * dx)
        lower[1:-1] = half_diffusion - advection
        diagonal[1:-1] = -diffusion_sq / (dx * dx) - decay
        upper[1:-1] = half_diffusion + advection
        diagonal[0] = -drift / dx - decay
        upper[0] = drift / dx
        lower[-1] = -drift / dx
        diagonal[-1] = drift / dx - decay
        self.lower = lower
        self.diagonal = diagonal
        self.upper = upper
        self.nx = nx

    def apply(self, v: np.ndarray) -> np.ndarray:
        out = self.diagonal * v
        out[:-1] += self.upper[:-1] * v[1:]
        out[1:] += self.lower[1:] * v[:-1]
        return out

    def implicit_banded(self, inv_dt: float, theta: float, intensity: np.ndarray) -> np.ndarray:
        ab = np.empty((3, self.nx))
        ab[0, 0] = 0.0
        ab[0, 1:] = -theta * self.upper[:-1]
        ab[1, :] = inv_dt - theta * self.diagonal + theta * intensity
        ab[2, :-1] = -theta * self.lower[1:]
        ab[2, -1] = 0.0
        return ab


def _policy_step(
    op: _Operator1D,
    v_old: np.ndarray,
    dt: float,
    theta: float,
    worst: bool,
    low_new: float,
    high_new: float,
    death_new: np.ndarray,
    source_new: np.ndarray,
    intensity_old: np.ndarray,
    death_old: np.ndarray,
    source_old: np.ndarray,
    max_iter: int,
    tol: float,
    damping: float,
) -> tuple[np.ndarray, np.ndarray]:
    inv_dt = 1.0 / dt
    explicit = v_old * inv_dt
    if theta < 1.0:
        weight = 1.0 - theta
        explicit = explicit + weight * (
            op.apply(v_old) - intensity_old * v_old + intensity_old * death_old + source_old
        )
    explicit = explicit + theta * source_new
    policy = _bang_bang_grid(death_new, v_old, low_new, high_new, worst)
    v_prev: np.ndarray | None = None
    for _ in range(max_iter):
        ab = op.implicit_banded(inv_dt, theta, policy)
        v_new = solve_banded((1, 1), ab, explicit + theta * policy * death_new)
        policy_new = _bang_bang_grid(death_new, v_new, low_new, high_new, worst)
        if damping < 1.0:
            policy_new = damping * policy_new + (1.0 - damping) * policy
        stable_policy = np.array_equal(policy_new, policy)
        stable_value = v_prev is not None and float(
            np.max(np.abs(v_new - v_prev))
        ) <= tol * max(1.0, float(np.max(np.abs(v_new))))
        policy = policy_new
        v_prev = v_new
        if stable_policy or stable_value:
            return v_new, policy
    raise GridTooCoarse(
        f"policy iteration did not converge within {max_iter} sweeps"
    )


def hjb_solve(
    cfg: HjbConfig,
    band: HazardBand,
    spec: ContractSpec,
    mkt: MarketParams,
    fund: FundParams,
    lam: LambdaVector,
) -> ValueSurface:
    """Solve the inner control problem backward from the horizon.

    Terminal data is the masked terminal payoff minus the signed horizon
    multiplier grossed up by the horizon discount; at every interior
    constraint time the value jumps by the corresponding signed multiplier.
    Between those times the value solves a reaction-diffusion equation whose
    reaction term is the bang-bang intensity times the gap between the death
    benefit and the value; each step freezes the intensity, solves the
    linear system, and re-derives the intensity until it is self-consistent.
    """
    n = cfg.n
    if abs(spec.maturity - n) > 1e-12 or spec.maturity != int(spec.maturity):
        raise NonIntegerMaturity(
            f"maturity {spec.maturity} must equal the integer horizon {n}"
        )
    if spec.valuation_time != 0:
        raise InvalidParameter("the reduced solver prices from time 0")
    if band.survival.n < n:
        raise AgeOutOfRange(
            f"hazard band covers {band.survival.n} years, horizon is {n}"
        )
    if len(lam.values) != n:
        raise InvalidParameter(
            f"multiplier vector has {len(lam.values)} entries, expected {n}"
        )
    masks = cfg.masks if cfg.masks is not None else spec.payoff_masks
    worst = cfg.direction is Direction.WORST
    sign = 1.0 if worst else -1.0

    grid = cfg.grid
    nx, nt = grid.nx, grid.nt_per_year
    x = np.linspace(grid.x_min, grid.x_max, nx)
    dx = float(x[1] - x[0])
    fund_levels = np.exp(x)
    diffusion_sq = cfg.sigma_a**2
    drift = cfg.r - 0.5 * diffusion_sq
    op = _Operator1D(nx, dx, drift, diffusion_sq, decay=cfg.r)
    dt = 1.0 / nt
    rows = n * nt
    times = np.linspace(0.0, float(n), rows + 1)
    values = np.empty((rows + 1, nx))
    policy = np.empty((rows + 1, nx))
    zeros = np.zeros(nx)
    start_value = fund.initial_value

    def guarantee_level(s: float) -> float:
        return spec.guarantee(start_value, s)

    def income_source(s: float) -> np.ndarray:
        if not masks.income:
            return zeros
        return start_value * spec.guarantee_rate + np.maximum(
            fund_levels - guarantee_level(s), 0.0
        )

    def death_payoff(s: float) -> np.ndarray:
        if not masks.death:
            return zeros
        return np.maximum(fund_levels, guarantee_level(s))

    if masks.accumulation:
        terminal = np.maximum(fund_levels, guarantee_level(float(n)))
    else:
        terminal = zeros.copy()
    terminal = terminal - sign * lam.value_at(n) * math.exp(cfg.r * n)
    values[rows] = terminal

    jump_sizes: dict[int, float] = {}
    policy_left: dict[int, np.ndarray] = {}

    v = terminal
    for year in reversed(range(n)):
        top = year + 1
        if top < n:
            adjust = sign * lam.value_at(top) * math.exp(cfg.r * top)
            jump_sizes[top] = adjust
            v = values[top * nt] - adjust
        low_end, high_end = band.edges_in_year(year, 1.0)
        end_policy = _bang_bang_grid(death_payoff(float(top)), v, low_end, high_end, worst)
        policy_left[top] = end_policy
        if top == n:
            policy[rows] = end_policy
        restart = top == n or jump_sizes.get(top, 0.0) != 0.0

        intensity_old = end_policy
        death_old = death_payoff(float(top))
        source_old = income_source(float(top))
        for k in reversed(range(nt)):
            row = year * nt + k
            t_new = year + k * dt
            if restart and k == nt - 1:
                # implicit restart: two half-steps damp the discontinuity
                for sub_t in (t_new + 0.5 * dt, t_new):
                    offset = sub_t - year
                    low, high = band.edges_in_year(year, offset)
                    v, pol = _policy_step(
                        op,
                        v,
                        0.5 * dt,
                        1.0,
                        worst,
                        low,
                        high,
                        death_payoff(sub_t),
                        income_source(sub_t),
                        intensity_old,
                        death_old,
                        source_old,
                        cfg.policy_max_iter,
                        cfg.policy_tol,
                        cfg.policy_damping,
                    )
            else:
                offset = k * dt
                low, high = band.edges_in_year(year, offset)
                v, pol = _policy_step(
                    op,
                    v,
                    dt,
                    0.5,
                    worst,
                    low,
                    high,
                    death_payoff(t_new),
                    income_source(t_new),
                    intensity_old,
                    death_old,
                    source_old,
                    cfg.policy_max_iter,
                    cfg.policy_tol,
                    cfg.policy_damping,
                )
            values[row] = v
            policy[row] = pol
            intensity_old = pol
            death_old = death_payoff(t_new)
            source_old = income_source(t_new)

    return ValueSurface(
        times=times,
        x=x,
        values=values,
        policy=policy,
        jump_sizes=jump_sizes,
        policy_left=policy_left,
        x0=math.log(start_value),
    )


def constraint_survival(
    cfg: HjbConfig, band: HazardBand, surface: ValueSurface
) -> dict[int, float]:
    """Survival probabilities implied by a policy surface.

    For each constrained horizon ``j`` solves the companion linear equation
    for the expectation of the exponential of minus the integrated optimal
    intensity, on the same grid as the value solve (fund generator, no
    discounting), and reads the result at the start state.
    """
    nx, nt = cfg.grid.nx, cfg.grid.nt_per_year
    if surface.x.shape != (nx,) or surface.values.shape != (cfg.n * nt + 1, nx):
        raise GridMismatch("surface grid does not match the configuration")
    x = surface.x
    dx = float(x[1] - x[0])
    diffusion_sq = cfg.sigma_a**2
    drift = cfg.r - 0.5 * diffusion_sq
    op = _Operator1D(nx, dx, drift, diffusion_sq, decay=0.0)
    inv_dt = float(nt)
    results: dict[int, float] = {}
    for horizon in cfg.constraint_times:
        u = np.ones(nx)
        for year in reversed(range(horizon)):
            intensity_old = surface.policy_left[year + 1]
            for k in reversed(range(nt)):
                intensity_new = surface.policy[year * nt + k]
                explicit = u * inv_dt + 0.5 * (op.apply(u) - intensity_old * u)
                ab = op.implicit_banded(inv_dt, 0.5, intensity_new)
                u = solve_banded((1, 1), ab, explicit)
                intensity_old = intensity_new
        results[horizon] = float(np.interp(surface.x0, x, u[:]))
    return results


@dataclass(frozen=True)
class RelaxedBounds:
    """Result of the outer multiplier optimization for one direction."""

    value: float
    lambda_star: LambdaVector
    residuals: tuple[float, ...]
    dual_iterations: int
    delta: float
    direction: Direction
    constraint_times: tuple[int, ...]

    @property
    def max_residual(self) -> float:
        return max(self.residuals) if self.residuals else 0.0


def optimize_lambda(
    cfg: HjbConfig,
    band: HazardBand,
    spec: ContractSpec,
    mkt: MarketParams,
    fund: FundParams,
    lambda0: LambdaVector | None = None,
    grad_tol: float = 1e-3,
    obj_rel_tol: float = 1e-6,
    max_evals: int = 300,
    search_box: float = 1e4,
    strict: bool = True,
) -> RelaxedBounds:
    """Optimize the constraint multipliers and return the price bound.

    Minimizes (worst case) or maximizes (best case) the dual objective,
    whose gradient per active horizon is the tabulated survival probability
    minus the one implied by the optimal policy.  A quasi-Newton pass does
    the bulk of the work; if the gradient norm is still above ``grad_tol``
    a projected subgradient polish with diminishing steps and iterate
    averaging takes over.  Convergence requires the gradient norm below
    ``grad_tol`` (the stationarity condition makes the constraints bind) and
    the objective stable to ``obj_rel_tol``.

    When the intensity switching surface is nearly state-independent (a
    flat death benefit region), the implied survival moves in quanta of
    roughly the band edge times the time step, and residuals cannot shrink
    below that floor on a fixed grid.  Every dual iterate is still a valid
    bound by weak duality, so with ``strict=False`` the best iterate is
    returned instead of raising; its residuals are reported as computed.
    """
    active = cfg.constraint_times
    targets = np.array([band.survival.cumulative(j) for j in active])
    worst = cfg.direction is Direction.WORST
    sign = 1.0 if worst else -1.0
    evals = 0
    best: tuple[float, np.ndarray, np.ndarray] | None = None  # (phi, z, grad)

    def embed(z: np.ndarray) -> LambdaVector:
        return LambdaVector.from_active(cfg.n, active, [float(v) for v in z])

    def dual(z: np.ndarray) -> tuple[float, np.ndarray]:
        nonlocal evals, best
        evals += 1
        surface = hjb_solve(cfg, band, spec, mkt, fund, embed(z))
        value0 = surface.initial_value()
        implied = constraint_survival(cfg, band, surface)
        gap = targets - np.array([implied[j] for j in active])
        phi = sign * value0 + float(np.dot(z, targets))
        if best is None or phi < best[0]:
            best = (phi, np.array(z, dtype=float), gap)
        return phi, gap

    if lambda0 is not None:
        z0 = np.array([lambda0.value_at(j) for j in active], dtype=float)
    else:
        z0 = np.zeros(len(active))

    if band.delta == 0.0:
        # collapsed band: the dual is flat, any multiplier gives the bound
        phi, gap = dual(z0)
        return RelaxedBounds(
            value=phi if worst else -phi,
            lambda_star=embed(z0),
            residuals=tuple(float(abs(g)) for g in gap),
            dual_iterations=evals,
            delta=0.0,
            direction=cfg.direction,
            constraint_times=active,
        )

    minimize(
        dual,
        z0,
        jac=True,
        method="L-BFGS-B",
        bounds=[(-search_box, search_box)] * len(active),
        options={
            "maxiter": max_evals,
            "maxfun": max_evals,
            "ftol": obj_rel_tol * 1e-3,
            "gtol": 0.3 * grad_tol,
        },
    )
    assert best is not None
    phi_best, z_best, gap_best = best

    if float(np.max(np.abs(gap_best))) > grad_tol:
        # subgradient polish: normalized steps shrinking as 1/sqrt(k), with
        # a running average of iterates evaluated alongside the raw ones;
        # bail out once the best residual stops improving (grid quantization)
        z = z_best.copy()
        averaged = z.copy()
        step_scale = max(1.0, float(np.linalg.norm(z_best)))
        phi_prev = phi_best
        best_residual = float(np.max(np.abs(gap_best)))
        since_improvement = 0
        stall_limit = 25
        for k in range(1, max_evals + 1):
            phi_k, gap_k = dual(z)
            residual_k = float(np.max(np.abs(gap_k)))
            if residual_k < best_residual - 0.05 * best_residual:
                best_residual = residual_k
                since_improvement = 0
            else:
                since_improvement += 1
            if residual_k <= grad_tol and abs(phi_k - phi_prev) <= obj_rel_tol * max(
                1.0, abs(phi_k)
            ):
                break
            if since_improvement >= stall_limit:
                break
            phi_prev = phi_k
            norm = float(np.linalg.norm(gap_k))
            if norm == 0.0:
                break
            z = z - (step_scale / math.sqrt(k)) * gap_k / norm
            np.clip(z, -search_box, search_box, out=z)
            averaged = averaged + (z - averaged) / (k + 1)
            if k % 10 == 0:
                dual(averaged)
        phi_best, z_best, gap_best = best

    residuals = tuple(float(abs(g)) for g in gap_best)
    bounds_value = phi_best if worst else -phi_best
    result = RelaxedBounds(
        value=bounds_value,
        lambda_star=embed(z_best),
        residuals=residuals,
        dual_iterations=evals,
        delta=band.delta,
        direction=cfg.direction,
        constraint_times=active,
    )
    if strict and max(residuals) > grad_tol:
        raise DualNotConverged(
            f"multiplier search stalled with residual {max(residuals):.3e} "
            f"after {evals} evaluations",
            best=result,
        )
    return result


@dataclass(frozen=True)
class DeltaSweepPoint:
    """Both direction bounds at one band width."""

    delta: float
    worst: RelaxedBounds
    best: RelaxedBounds


def delta_sweep(
    cfg: HjbConfig,
    spec: ContractSpec,
    mkt: MarketParams,
    fund: FundParams,
    deltas: Sequence[float],
    survival: AnnualSurvival,
    kind: FaaKind = FaaKind.BALDUCCI,
) -> list[DeltaSweepPoint]:
    """Worst and best bounds across increasing band widths.

    Widening the band enlarges the admissible set, so worst values are
    non-decreasing and best values non-increasing in the width; successive
    differences in the output signal how quickly both curves flatten.
    Multipliers warm-start from the previous width.  Sweeps are qualitative
    curves, so stalled multiplier searches fall back to their best iterate
    (still a valid bound by weak duality).
    """
    if any(b < a for a, b in zip(deltas[:-1], deltas[1:])) or any(
        d < 0 for d in deltas
    ):
        raise InvalidParameter("deltas must be non-decreasing and >= 0")
    points: list[DeltaSweepPoint] = []
    warm_worst: LambdaVector | None = None
    warm_best: LambdaVector | None = None
    for delta in deltas:
        band = HazardBand(survival, kind, float(delta))
        worst = optimize_lambda(
            replace(cfg, direction=Direction.WORST),
            band,
            spec,
            mkt,
            fund,
            warm_worst,
            strict=False,
        )
        best = optimize_lambda(
            replace(cfg, direction=Direction.BEST),
            band,
            spec,
            mkt,
            fund,
            warm_best,
            strict=False,
        )
        warm_worst, warm_best = worst.lambda_star, best.lambda_star
        points.append(DeltaSweepPoint(delta=float(delta), worst=worst, best=best))
    return points
