"""Life tables, one-year survival probabilities, and fractional-age survival.

A life table reports expected survivor counts ``l_x`` at consecutive integer
ages.  Ratios of adjacent counts give the one-year survival probabilities,
and a fractional-age assumption (uniform deaths, constant force, or Balducci)
interpolates the survival curve inside each year.  The matching hazard rates
are exposed alongside the survival curves so integral identities such as
``integral of the hazard over a year == -log(annual survival)`` can be
checked directly.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from enum import Enum

from .errors import (
    AgeOutOfRange,
    HorizonExceeded,
    IncreasingCount,
    InvalidParameter,
    LifeTableParseError,
    MissingHeader,
    NonConsecutiveAges,
    NonPositiveCount,
)

__all__ = [
    "FaaKind",
    "LifeTable",
    "AnnualSurvival",
    "parse_life_table",
    "make_makeham_table",
    "annual_survival_probs",
    "faa_survival",
    "faa_hazard",
]


class FaaKind(Enum):
    """Fractional-age assumption used between integer ages."""

    UDD = "udd"
    CFM = "cfm"
    BALDUCCI = "balducci"


@dataclass(frozen=True)
class LifeTable:
    """Expected survivor counts at consecutive integer ages.

    Attributes
    ----------
    base_age : int
        Age of the first entry.
    counts : tuple of float
        Survivor counts ``l_x`` for ages ``base_age, base_age + 1, ...``.
        Counts must be positive and non-increasing; fractional counts are
        allowed (they are expectations, not head counts).
    """

    base_age: int
    counts: tuple[float, ...]

    def __post_init__(self):
        if self.base_age < 0:
            raise InvalidParameter(f"base_age must be >= 0, got {self.base_age}")
        if len(self.counts) < 1:
            raise InvalidParameter("a life table needs at least one entry")
        previous = None
        for offset, count in enumerate(self.counts):
            if not (math.isfinite(count) and count > 0):
                raise NonPositiveCount(
                    f"l_x must be a positive finite number; "
                    f"age {self.base_age + offset} has {count}"
                )
            if previous is not None and count > previous:
                raise IncreasingCount(
                    f"l_x must be non-increasing; age {self.base_age + offset} "
                    f"has {count} after {previous}"
                )
            previous = count

    @property
    def max_age(self) -> int:
        return self.base_age + len(self.counts) - 1

    def count_at(self, age: int) -> float:
        if not self.base_age <= age <= self.max_age:
            raise AgeOutOfRange(
                f"age {age} outside table range [{self.base_age}, {self.max_age}]"
            )
        return self.counts[age - self.base_age]


@dataclass(frozen=True)
class AnnualSurvival:
    """One-year survival probabilities anchored at an integer age.

    ``probs[j]`` is the probability that a life aged ``anchor_age + j``
    survives one more year.  Values of exactly 1 are admitted (a year with
    no mortality); zero is not, so hazards stay finite.
    """

    anchor_age: int
    probs: tuple[float, ...]

    def __post_init__(self):
        for j, p in enumerate(self.probs):
            if not (math.isfinite(p) and 0.0 < p <= 1.0):
                raise InvalidParameter(
                    f"annual survival probabilities must lie in (0, 1]; "
                    f"year {j} has {p}"
                )

    @property
    def n(self) -> int:
        """Number of covered years."""
        return len(self.probs)

    def cumulative(self, years: int) -> float:
        """Survival probability over the first ``years`` whole years."""
        if not 0 <= years <= self.n:
            raise HorizonExceeded(f"{years} years requested, {self.n} available")
        return math.prod(self.probs[:years])

    def truncated(self, years: int) -> "AnnualSurvival":
        """The first ``years`` entries as a new curve."""
        if years > self.n:
            raise HorizonExceeded(f"{years} years requested, {self.n} available")
        return AnnualSurvival(self.anchor_age, self.probs[:years])


def parse_life_table(text: str) -> LifeTable:
    """Parse a two-column CSV document ``age,lx`` into a validated table.

    Rows must be sorted by age with no gaps.  Data rows are numbered from 1
    in error messages (the header is row 0).

    Raises
    ------
    MissingHeader
        First row is not ``age,lx`` or the document is empty.
    NonConsecutiveAges, NonPositiveCount, IncreasingCount
        Invariant violations; the exception carries the offending row index.
    """
    rows = [
        row
        for row in csv.reader(io.StringIO(text))
        if row and any(cell.strip() for cell in row)
    ]
    if not rows:
        raise MissingHeader("empty life-table document")
    header = [cell.strip().lower() for cell in rows[0]]
    if header != ["age", "lx"]:
        raise MissingHeader(f"expected header 'age,lx', got {','.join(rows[0])!r}")

    ages: list[int] = []
    counts: list[float] = []
    for index, row in enumerate(rows[1:], start=1):
        if len(row) != 2:
            raise LifeTableParseError(
                f"row {index}: expected two columns, got {len(row)}", row=index
            )
        try:
            age = int(row[0].strip())
            count = float(row[1].strip())
        except ValueError as exc:
            raise LifeTableParseError(f"row {index}: {exc}", row=index) from exc
        if age < 0:
            raise LifeTableParseError(f"row {index}: negative age {age}", row=index)
        if ages and age != ages[-1] + 1:
            raise NonConsecutiveAges(
                f"row {index}: age {age} does not follow {ages[-1]}", row=index
            )
        if not (math.isfinite(count) and count > 0):
            raise NonPositiveCount(
                f"row {index}: l_x must be positive, got {row[1].strip()}", row=index
            )
        if counts and count > counts[-1]:
            raise IncreasingCount(
                f"row {index}: l_x increased from {counts[-1]} to {count}", row=index
            )
        ages.append(age)
        counts.append(count)

    if not ages:
        raise LifeTableParseError("no data rows after the header")
    return LifeTable(base_age=ages[0], counts=tuple(counts))


def make_makeham_table(
    hazard_floor: float,
    hazard_scale: float,
    hazard_growth: float,
    base_age: int,
    span: int,
    radix: float = 100_000.0,
) -> LifeTable:
    """Generate a synthetic table from the hazard ``floor + scale * growth**age``.

    Annual counts follow ``l_{x+1} = l_x * exp(-integral of the hazard over
    [x, x+1])`` with the integral evaluated in closed form, so the counts are
    exactly consistent with the continuous hazard.

    Parameters
    ----------
    hazard_floor : float
        Age-independent hazard component, >= 0.
    hazard_scale : float
        Weight of the exponential component, > 0.
    hazard_growth : float
        Annual growth factor of the exponential component, > 1.
    base_age, span : int
        First age and number of one-year steps; the table covers
        ``base_age .. base_age + span``.
    radix : float
        Count at ``base_age``.
    """
    if (
        hazard_floor < 0
        or hazard_scale <= 0
        or hazard_growth <= 1
        or span < 1
        or base_age < 0
        or radix <= 0
    ):
        raise InvalidParameter(
            "require hazard_floor >= 0, hazard_scale > 0, hazard_growth > 1, "
            "span >= 1, base_age >= 0, radix > 0"
        )
    log_growth = math.log(hazard_growth)
    counts = [float(radix)]
    for step in range(span):
        age = base_age + step
        yearly = hazard_floor + hazard_scale * hazard_growth**age * (
            hazard_growth - 1.0
        ) / log_growth
        counts.append(counts[-1] * math.exp(-yearly))
    return LifeTable(base_age=base_age, counts=tuple(counts))


def annual_survival_probs(table: LifeTable, age: int, years: int) -> AnnualSurvival:
    """One-year survival probabilities for ages ``age .. age + years - 1``."""
    if years < 0:
        raise InvalidParameter(f"years must be >= 0, got {years}")
    if age < table.base_age or age + years > table.max_age:
        raise AgeOutOfRange(
            f"ages {age}..{age + years} not covered by table "
            f"[{table.base_age}, {table.max_age}]"
        )
    start = age - table.base_age
    probs = tuple(
        table.counts[start + j + 1] / table.counts[start + j] for j in range(years)
    )
    return AnnualSurvival(anchor_age=age, probs=probs)


def _within_year_survival(p: float, kind: FaaKind, u: float) -> float:
    # u in [0, 1] is the elapsed fraction of the year with annual survival p.
    if kind is FaaKind.UDD:
        return 1.0 - u * (1.0 - p)
    if kind is FaaKind.CFM:
        return p**u
    return p / (u + (1.0 - u) * p)


def _within_year_hazard(p: float, kind: FaaKind, u: float) -> float:
    q = 1.0 - p
    if kind is FaaKind.UDD:
        return q / (1.0 - u * q)
    if kind is FaaKind.CFM:
        return -math.log(p)
    return q / (p + u * q)


def faa_survival(p: AnnualSurvival, kind: FaaKind, t: float) -> float:
    """Survival probability to time ``t`` under a fractional-age assumption.

    Whole years multiply the tabulated probabilities exactly; the fractional
    remainder uses the within-year formula of ``kind``.  At integer ``t`` all
    three assumptions agree with the plain product.
    """
    if t < 0:
        raise InvalidParameter(f"t must be >= 0, got {t}")
    n = p.n
    if t > n:
        if t - n < 1e-9:  # tolerate float noise from time grids
            t = float(n)
        else:
            raise HorizonExceeded(f"t={t} exceeds the {n}-year horizon")
    whole = int(math.floor(t))
    frac = t - whole
    if whole >= n:
        whole, frac = n, 0.0
    value = math.prod(p.probs[:whole])
    if frac > 0.0:
        value *= _within_year_survival(p.probs[whole], kind, frac)
    return value


def faa_hazard(p: AnnualSurvival, kind: FaaKind, t: float) -> float:
    """Hazard rate at time ``t`` under a fractional-age assumption.

    At integer times the right-limit is returned (the next year's formula at
    elapsed fraction 0); hazards only ever enter integrals, so the convention
    at these isolated points is immaterial.
    """
    if t < 0:
        raise InvalidParameter(f"t must be >= 0, got {t}")
    if t >= p.n:
        raise HorizonExceeded(f"t={t} is at or beyond the {p.n}-year horizon")
    whole = int(math.floor(t))
    return _within_year_hazard(p.probs[whole], kind, t - whole)
