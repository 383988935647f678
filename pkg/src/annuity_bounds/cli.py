"""Batch front-end: JSON run configurations in, CSV result tables out.

One configuration selects a mode (survival curves, baseline prices, strict
bounds, relaxed bounds, band-width sweep, or Monte Carlo audit) and the
cartesian product of ages and maturities to evaluate.  Cells are
independent and may be computed in a process pool; results are always
written in deterministic cell order, so re-running an identical
configuration reproduces the CSV byte for byte.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Any

from . import __version__
from .errors import AnnuityBoundsError, ConfigInvalid, SolverFailure
from .lifetable import (
    AnnualSurvival,
    FaaKind,
    LifeTable,
    annual_survival_probs,
    faa_survival,
    make_makeham_table,
    parse_life_table,
)
from .market import (
    ContractKind,
    ContractSpec,
    FundParams,
    MarketParams,
    YieldCurveParams,
    deterministic_market,
)
from .mc_oracle import McConfig, verify_bounds
from .relaxed_hjb import (
    Direction,
    GridSpec,
    HazardBand,
    HjbConfig,
    delta_sweep,
    optimize_lambda,
)
from .strict_bounds import (
    StepDirection,
    faa_baseline_price,
    gmab_bounds,
    gmdb_bounds,
    gmib_bounds,
    step_survival,
)

MODES = (
    "survival-curves",
    "faa-price",
    "strict-bounds",
    "relaxed-bounds",
    "delta-sweep",
    "mc-check",
)

_NUMERIC_DEFAULTS: dict[str, Any] = {
    "nodes_per_panel": 32,
    "nx": 401,
    "nt_per_year": 64,
    "delta": 1.0,
    "constraints": "full",  # or "terminal"
    "reduced_rate": 0.01,
    "faa": "balducci",
    "deltas": [0.25, 0.5, 1.0, 2.0, 4.0],
    "paths": 20_000,
    "steps_per_year": 64,
    "seed": 20240601,
    "antithetic": True,
    "samples": 20,
    "horizon": 5.0,
    "time_step": 0.01,
}


@dataclass(frozen=True)
class RunPlan:
    """Validated, picklable description of one batch run."""

    mode: str
    table: LifeTable
    market: MarketParams
    fund: FundParams
    kind: ContractKind
    guarantee_rate: float
    ages: tuple[int, ...]
    maturities: tuple[float, ...]
    numerics: dict[str, Any]
    output: str | None
    config_hash: str


def _require(condition: bool, message: str) -> None:
    if not condition:
        raise ConfigInvalid(message)


def _section(config: dict, name: str) -> dict:
    _require(name in config, f"missing required section '{name}'")
    _require(isinstance(config[name], dict), f"section '{name}' must be an object")
    return config[name]


def _number(section: dict, key: str, where: str) -> float:
    _require(key in section, f"{where}: missing key '{key}'")
    value = section[key]
    _require(
        isinstance(value, (int, float)) and not isinstance(value, bool),
        f"{where}: '{key}' must be a number",
    )
    return float(value)


def _load_table(section: dict, base_dir: Path) -> LifeTable:
    if "path" in section:
        path = Path(section["path"])
        if not path.is_absolute():
            path = base_dir / path
        _require(path.is_file(), f"life_table: file not found: {path}")
        return parse_life_table(path.read_text())
    if "makeham" in section:
        params = section["makeham"]
        _require(isinstance(params, dict), "life_table.makeham must be an object")
        return make_makeham_table(
            hazard_floor=_number(params, "A", "life_table.makeham"),
            hazard_scale=_number(params, "B", "life_table.makeham"),
            hazard_growth=_number(params, "c", "life_table.makeham"),
            base_age=int(_number(params, "base_age", "life_table.makeham")),
            span=int(_number(params, "span", "life_table.makeham")),
            radix=float(params.get("l0", 100_000.0)),
        )
    raise ConfigInvalid("life_table needs either 'path' or 'makeham'")


def build_plan(config: dict, base_dir: Path) -> RunPlan:
    """Validate a configuration document and resolve it into a plan.

    Raises ``ConfigInvalid`` with a pointed message on the first violation;
    no computation happens here.
    """
    _require(isinstance(config, dict), "configuration must be a JSON object")
    mode = config.get("mode")
    _require(mode in MODES, f"mode must be one of {', '.join(MODES)}; got {mode!r}")

    table = _load_table(_section(config, "life_table"), base_dir)

    market_cfg = _section(config, "market")
    curve_cfg = _section(market_cfg, "curve")
    try:
        curve = YieldCurveParams(
            a=_number(curve_cfg, "a", "market.curve"),
            b=_number(curve_cfg, "b", "market.curve"),
            c=_number(curve_cfg, "c", "market.curve"),
            d=_number(curve_cfg, "d", "market.curve"),
        )
        market = MarketParams(
            kappa=_number(market_cfg, "kappa", "market"),
            sigma_r=_number(market_cfg, "sigma_r", "market"),
            sigma_s=_number(market_cfg, "sigma_S", "market"),
            rho=_number(market_cfg, "rho", "market"),
            r0=_number(market_cfg, "r0", "market"),
            curve=curve,
            mu_s=market_cfg.get("mu_S"),
        )
        fund_cfg = _section(config, "fund")
        fund = FundParams(
            initial_value=_number(fund_cfg, "A0", "fund"),
            pi_s=_number(fund_cfg, "pi_S", "fund"),
            pi_p=_number(fund_cfg, "pi_P", "fund"),
        )
    except AnnuityBoundsError as exc:
        raise ConfigInvalid(str(exc)) from exc

    contract = _section(config, "contract")
    kind_name = contract.get("kind")
    try:
        kind = ContractKind(str(kind_name).lower())
    except ValueError:
        raise ConfigInvalid(f"contract.kind must be gmab/gmib/gmdb, got {kind_name!r}")
    _require(kind is not ContractKind.COMBINED, "batch runs price single products")
    guarantee_rate = _number(contract, "r_g", "contract")
    ages = contract.get("ages")
    _require(
        isinstance(ages, list) and ages and all(isinstance(a, int) for a in ages),
        "contract.ages must be a nonempty list of integers",
    )
    maturities = contract.get("maturities", [1])
    _require(
        isinstance(maturities, list)
        and all(isinstance(m, (int, float)) for m in maturities),
        "contract.maturities must be a list of numbers",
    )

    numerics = dict(_NUMERIC_DEFAULTS)
    user_numerics = config.get("numerics", {})
    _require(isinstance(user_numerics, dict), "numerics must be an object")
    unknown = set(user_numerics) - set(_NUMERIC_DEFAULTS)
    _require(not unknown, f"unknown numerics keys: {sorted(unknown)}")
    numerics.update(user_numerics)
    _require(
        numerics["constraints"] in ("full", "terminal"),
        "numerics.constraints must be 'full' or 'terminal'",
    )
    try:
        FaaKind(numerics["faa"])
    except ValueError:
        raise ConfigInvalid(f"numerics.faa must be udd/cfm/balducci, got {numerics['faa']!r}")

    if mode in ("relaxed-bounds", "delta-sweep", "mc-check"):
        for maturity in maturities:
            _require(
                float(maturity) == int(maturity),
                f"mode {mode} needs integer maturities, got {maturity}",
            )

    for age in ages:
        horizon = (
            numerics["horizon"]
            if mode == "survival-curves"
            else max(float(m) for m in maturities)
        )
        _require(
            table.base_age <= age and age + math.ceil(horizon) <= table.max_age,
            f"table [{table.base_age}, {table.max_age}] does not cover age {age} "
            f"to {age + math.ceil(horizon)}",
        )

    canonical = json.dumps(config, sort_keys=True, separators=(",", ":"))
    config_hash = hashlib.sha256(canonical.encode()).hexdigest()
    return RunPlan(
        mode=mode,
        table=table,
        market=market,
        fund=fund,
        kind=kind,
        guarantee_rate=guarantee_rate,
        ages=tuple(int(a) for a in ages),
        maturities=tuple(float(m) for m in maturities),
        numerics=numerics,
        output=config.get("output"),
        config_hash=config_hash,
    )


def _survival_for(plan: RunPlan, age: int, years: int) -> AnnualSurvival:
    return annual_survival_probs(plan.table, age, years)


def _spec_for(plan: RunPlan, age: int, maturity: float) -> ContractSpec:
    return ContractSpec(
        kind=plan.kind,
        guarantee_rate=plan.guarantee_rate,
        age=age,
        valuation_time=0.0,
        maturity=maturity,
    )


def _reduced_setup(plan: RunPlan, age: int, maturity: float):
    numerics = plan.numerics
    rate = float(numerics["reduced_rate"])
    sigma_a = plan.fund.pi_s * plan.market.sigma_s
    n = int(maturity)
    grid = GridSpec.centered(
        math.log(plan.fund.initial_value),
        sigma_a,
        maturity,
        nx=int(numerics["nx"]),
        nt_per_year=int(numerics["nt_per_year"]),
    )
    constraint_times = (
        tuple(range(1, n + 1)) if numerics["constraints"] == "full" else (n,)
    )
    survival = _survival_for(plan, age, n)
    kind = FaaKind(numerics["faa"])
    reduced_market = deterministic_market(rate, plan.market.sigma_s)

    def config(direction: Direction) -> HjbConfig:
        return HjbConfig(
            n=n,
            r=rate,
            sigma_a=sigma_a,
            grid=grid,
            constraint_times=constraint_times,
            direction=direction,
        )

    return survival, kind, reduced_market, config


def _format(value: Any) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return format(value, ".12g")
    return str(value)


def _cell_survival_curves(plan: RunPlan, age: int) -> list[list[Any]]:
    numerics = plan.numerics
    horizon = float(numerics["horizon"])
    step = float(numerics["time_step"])
    years = math.ceil(horizon)
    survival = _survival_for(plan, age, years)
    rows = []
    count = int(round(horizon / step))
    for i in range(count + 1):
        t = min(i * step, horizon)
        rows.append(
            [
                age,
                t,
                faa_survival(survival, FaaKind.UDD, t),
                faa_survival(survival, FaaKind.CFM, t),
                faa_survival(survival, FaaKind.BALDUCCI, t),
                step_survival(survival, StepDirection.SUP, 0.0, t),
                step_survival(survival, StepDirection.INF, 0.0, t),
            ]
        )
    return rows


def _cell_faa_price(plan: RunPlan, age: int, maturity: float) -> list[list[Any]]:
    spec = _spec_for(plan, age, maturity)
    survival = _survival_for(plan, age, math.ceil(maturity))
    values = [
        faa_baseline_price(
            spec,
            plan.market,
            plan.fund,
            survival,
            kind,
            plan.market.r0,
            plan.fund.initial_value,
            order=int(plan.numerics["nodes_per_panel"]),
        )
        for kind in (FaaKind.UDD, FaaKind.CFM, FaaKind.BALDUCCI)
    ]
    return [[age, maturity, *values]]


def _cell_strict_bounds(plan: RunPlan, age: int, maturity: float) -> list[list[Any]]:
    spec = _spec_for(plan, age, maturity)
    survival = _survival_for(plan, age, math.ceil(maturity))
    order = int(plan.numerics["nodes_per_panel"])
    baselines = [
        faa_baseline_price(
            spec,
            plan.market,
            plan.fund,
            survival,
            kind,
            plan.market.r0,
            plan.fund.initial_value,
            order=order,
        )
        for kind in (FaaKind.UDD, FaaKind.CFM, FaaKind.BALDUCCI)
    ]
    args = (spec, plan.market, plan.fund, survival, plan.market.r0, plan.fund.initial_value)
    if plan.kind is ContractKind.GMAB:
        bounds = gmab_bounds(*args)
    elif plan.kind is ContractKind.GMIB:
        bounds = gmib_bounds(*args, order=order)
    else:
        bounds = gmdb_bounds(*args)
    return [
        [age, maturity, *baselines, bounds.lower, bounds.upper, bounds.assumptions_violated]
    ]


def _cell_relaxed_bounds(plan: RunPlan, age: int, maturity: float) -> list[list[Any]]:
    survival, kind, reduced_market, config = _reduced_setup(plan, age, maturity)
    delta = float(plan.numerics["delta"])
    band = HazardBand(survival, kind, delta)
    spec = _spec_for(plan, age, maturity)
    baseline = faa_baseline_price(
        spec,
        reduced_market,
        plan.fund,
        survival,
        kind,
        reduced_market.r0,
        plan.fund.initial_value,
        order=int(plan.numerics["nodes_per_panel"]),
    )
    worst = optimize_lambda(
        config(Direction.WORST), band, spec, reduced_market, plan.fund, strict=False
    )
    best = optimize_lambda(
        config(Direction.BEST), band, spec, reduced_market, plan.fund, strict=False
    )
    residual = max(worst.max_residual, best.max_residual)
    return [
        [
            age,
            maturity,
            delta,
            plan.numerics["constraints"],
            baseline,
            best.value,
            worst.value,
            residual,
        ]
    ]


def _cell_delta_sweep(plan: RunPlan, age: int, maturity: float) -> list[list[Any]]:
    survival, kind, reduced_market, config = _reduced_setup(plan, age, maturity)
    spec = _spec_for(plan, age, maturity)
    points = delta_sweep(
        config(Direction.WORST),
        spec,
        reduced_market,
        plan.fund,
        [float(d) for d in plan.numerics["deltas"]],
        survival,
        kind,
    )
    return [
        [age, maturity, point.delta, point.worst.value, point.best.value]
        for point in points
    ]


def _cell_mc_check(plan: RunPlan, age: int, maturity: float) -> list[list[Any]]:
    survival, kind, reduced_market, config = _reduced_setup(plan, age, maturity)
    spec = _spec_for(plan, age, maturity)
    order = int(plan.numerics["nodes_per_panel"])
    args = (
        spec,
        reduced_market,
        plan.fund,
        survival,
        reduced_market.r0,
        plan.fund.initial_value,
    )
    if plan.kind is ContractKind.GMAB:
        strict = gmab_bounds(*args)
    elif plan.kind is ContractKind.GMIB:
        strict = gmib_bounds(*args, order=order)
    else:
        strict = gmdb_bounds(*args)
    delta = float(plan.numerics["delta"])
    band = HazardBand(survival, kind, delta)
    worst = optimize_lambda(
        config(Direction.WORST), band, spec, reduced_market, plan.fund, strict=False
    )
    best = optimize_lambda(
        config(Direction.BEST), band, spec, reduced_market, plan.fund, strict=False
    )
    mc_cfg = McConfig(
        paths=int(plan.numerics["paths"]),
        steps_per_year=int(plan.numerics["steps_per_year"]),
        seed=int(plan.numerics["seed"]),
        antithetic=bool(plan.numerics["antithetic"]),
    )
    report = verify_bounds(
        spec,
        strict,
        worst,
        best,
        int(plan.numerics["samples"]),
        mc_cfg,
        reduced_market,
        plan.fund,
        survival,
        kind,
    )
    return [
        [
            age,
            maturity,
            record.family,
            record.label,
            record.price,
            record.stderr,
            record.lower,
            record.upper,
            record.inside,
        ]
        for record in report.records
    ]


_HEADERS = {
    "survival-curves": ["age", "t", "udd", "cfm", "balducci", "sup", "inf"],
    "faa-price": ["age", "maturity", "faa_udd", "faa_cfm", "faa_balducci"],
    "strict-bounds": [
        "age",
        "maturity",
        "faa_udd",
        "faa_cfm",
        "faa_balducci",
        "strict_lower",
        "strict_upper",
        "assumptions_violated",
    ],
    "relaxed-bounds": [
        "age",
        "maturity",
        "delta",
        "constraints",
        "baseline",
        "relaxed_lower",
        "relaxed_upper",
        "residual_max",
    ],
    "delta-sweep": ["age", "maturity", "delta", "worst", "best"],
    "mc-check": [
        "age",
        "maturity",
        "family",
        "label",
        "price",
        "stderr",
        "lower",
        "upper",
        "inside",
    ],
}


def _compute_cell(payload: tuple[RunPlan, int, float | None]) -> list[list[Any]]:
    plan, age, maturity = payload
    if plan.mode == "survival-curves":
        return _cell_survival_curves(plan, age)
    assert maturity is not None
    handler = {
        "faa-price": _cell_faa_price,
        "strict-bounds": _cell_strict_bounds,
        "relaxed-bounds": _cell_relaxed_bounds,
        "delta-sweep": _cell_delta_sweep,
        "mc-check": _cell_mc_check,
    }[plan.mode]
    return handler(plan, age, maturity)


def execute(plan: RunPlan) -> tuple[list[str], list[list[Any]]]:
    """Run every cell of the plan and return (header, rows) in cell order."""
    if plan.mode == "survival-curves":
        payloads = [(plan, age, None) for age in plan.ages]
    else:
        payloads = [
            (plan, age, maturity)
            for age in plan.ages
            for maturity in plan.maturities
        ]
    workers = int(os.environ.get("ANNUITY_BOUNDS_THREADS", "1"))
    if workers > 1 and len(payloads) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            blocks = list(pool.map(_compute_cell, payloads))
    else:
        blocks = [_compute_cell(payload) for payload in payloads]
    rows = [row for block in blocks for row in block]
    return _HEADERS[plan.mode], rows


def write_result(
    path: Path, header: list[str], rows: list[list[Any]], config_hash: str
) -> None:
    lines = [f"# config_sha256={config_hash} tool=annuity-bounds/{__version__}"]
    lines.append(",".join(header))
    for row in rows:
        lines.append(",".join(_format(value) for value in row))
    path.write_text("\n".join(lines) + "\n")


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="annuity-bounds",
        description="Batch valuation of guarantee bounds under life-table constraints",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    run_parser = sub.add_parser("run", help="execute a configuration and write a CSV")
    run_parser.add_argument("--config", required=True, help="JSON configuration file")
    run_parser.add_argument("--out", help="output CSV path (overrides the config)")
    validate_parser = sub.add_parser("validate", help="check a configuration only")
    validate_parser.add_argument("--config", required=True)
    args = parser.parse_args(argv)

    config_path = Path(args.config)
    try:
        if not config_path.is_file():
            raise ConfigInvalid(f"configuration file not found: {config_path}")
        try:
            config = json.loads(config_path.read_text())
        except json.JSONDecodeError as exc:
            raise ConfigInvalid(f"configuration is not valid JSON: {exc}") from exc
        plan = build_plan(config, config_path.resolve().parent)
    except (ConfigInvalid, AnnuityBoundsError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    if args.command == "validate":
        print(f"configuration OK: mode={plan.mode}, {len(plan.ages)} ages")
        return 0

    out = args.out or plan.output
    if out is None:
        print("error: no output path (set --out or the config's 'output')", file=sys.stderr)
        return 2
    out_path = Path(out)
    if not out_path.is_absolute():
        out_path = Path.cwd() / out_path

    try:
        header, rows = execute(plan)
    except AnnuityBoundsError as exc:
        print(f"numerical failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3

    write_result(out_path, header, rows, plan.config_hash)
    print(f"wrote {len(rows)} rows to {out_path}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
