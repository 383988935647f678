"""Tests for life-table parsing and fractional-age survival/hazard curves."""

from __future__ import annotations

import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad

from annuity_bounds import (
    AgeOutOfRange,
    AnnualSurvival,
    FaaKind,
    HorizonExceeded,
    IncreasingCount,
    InvalidParameter,
    LifeTable,
    MissingHeader,
    NonConsecutiveAges,
    NonPositiveCount,
    annual_survival_probs,
    faa_hazard,
    faa_survival,
    make_makeham_table,
    parse_life_table,
)

ALL_KINDS = [FaaKind.UDD, FaaKind.CFM, FaaKind.BALDUCCI]


class TestParseLifeTable:
    def test_basic_document(self) -> None:
        table = parse_life_table("age,lx\n40,100000\n41,99000\n42,97900")
        assert table.base_age == 40
        assert table.counts == (100000.0, 99000.0, 97900.0)

    def test_header_required(self) -> None:
        with pytest.raises(MissingHeader):
            parse_life_table("40,100000\n41,99000")

    def test_empty_document(self) -> None:
        with pytest.raises(MissingHeader):
            parse_life_table("")

    def test_age_gap_names_row(self) -> None:
        with pytest.raises(NonConsecutiveAges) as excinfo:
            parse_life_table("age,lx\n40,100\n42,90")
        assert excinfo.value.row == 2

    def test_increasing_count_names_row(self) -> None:
        with pytest.raises(IncreasingCount) as excinfo:
            parse_life_table("age,lx\n40,100\n41,101")
        assert excinfo.value.row == 2

    def test_zero_count_rejected(self) -> None:
        with pytest.raises(NonPositiveCount) as excinfo:
            parse_life_table("age,lx\n40,100\n41,0")
        assert excinfo.value.row == 2

    def test_fractional_counts_allowed(self) -> None:
        table = parse_life_table("age,lx\n40,100.5\n41,99.25")
        assert table.counts == (100.5, 99.25)

    def test_equal_counts_allowed(self) -> None:
        table = parse_life_table("age,lx\n40,100\n41,100")
        assert table.counts == (100.0, 100.0)

    def test_whitespace_tolerated(self) -> None:
        table = parse_life_table("age, lx\n 40 , 100000 \n 41 , 99000 ")
        assert table.base_age == 40

    def test_bundled_table_roundtrip(self, table: LifeTable) -> None:
        assert table.base_age == 40
        assert table.max_age == 100
        assert table.counts[0] == pytest.approx(100000.0)


class TestMakehamTable:
    def test_constant_hazard_limit(self) -> None:
        """With a vanishing exponential component every ratio is exp(-floor)."""
        table = make_makeham_table(0.01, 1e-15, 1.09, 40, 10)
        for j in range(10):
            ratio = table.counts[j + 1] / table.counts[j]
            assert ratio == pytest.approx(math.exp(-0.01), rel=1e-10)

    def test_first_ratio_matches_quadrature(self) -> None:
        """Closed-form yearly integral agrees with numerical quadrature."""
        floor, scale, growth = 0.0002, 3e-5, 1.09
        table = make_makeham_table(floor, scale, growth, 40, 60)
        integral, _ = quad(lambda s: floor + scale * growth**s, 40.0, 41.0)
        assert table.counts[1] / table.counts[0] == pytest.approx(
            math.exp(-integral), rel=1e-12
        )

    def test_counts_strictly_decreasing(self) -> None:
        table = make_makeham_table(0.0002, 3e-5, 1.09, 40, 60)
        for a, b in zip(table.counts[:-1], table.counts[1:]):
            assert b < a

    def test_empty_span_rejected(self) -> None:
        with pytest.raises(InvalidParameter):
            make_makeham_table(0.0002, 3e-5, 1.09, 40, 0)

    @pytest.mark.parametrize(
        "floor,scale,growth",
        [(-0.1, 3e-5, 1.09), (0.0002, 0.0, 1.09), (0.0002, 3e-5, 1.0)],
    )
    def test_invalid_parameters_rejected(self, floor, scale, growth) -> None:
        with pytest.raises(InvalidParameter):
            make_makeham_table(floor, scale, growth, 40, 10)


class TestAnnualSurvival:
    def test_ratios(self) -> None:
        table = LifeTable(40, (100000.0, 99000.0, 97900.0))
        p = annual_survival_probs(table, 40, 2)
        assert p.probs[0] == pytest.approx(0.99)
        assert p.probs[1] == pytest.approx(97900.0 / 99000.0)

    def test_constant_counts_give_certain_survival(self) -> None:
        table = LifeTable(40, (100.0, 100.0, 100.0))
        p = annual_survival_probs(table, 40, 2)
        assert p.probs == (1.0, 1.0)

    def test_span_beyond_table_rejected(self, table: LifeTable) -> None:
        with pytest.raises(AgeOutOfRange):
            annual_survival_probs(table, 95, 10)

    def test_cumulative_is_product(self, table: LifeTable) -> None:
        p = annual_survival_probs(table, 60, 5)
        assert p.cumulative(3) == pytest.approx(math.prod(p.probs[:3]), rel=1e-15)

    def test_zero_probability_rejected(self) -> None:
        with pytest.raises(InvalidParameter):
            AnnualSurvival(40, (0.9, 0.0))


class TestFaaSurvival:
    def test_udd_half_year(self) -> None:
        p = AnnualSurvival(40, (0.99,))
        assert faa_survival(p, FaaKind.UDD, 0.5) == pytest.approx(0.995)

    def test_cfm_half_year(self) -> None:
        p = AnnualSurvival(40, (0.81,))
        assert faa_survival(p, FaaKind.CFM, 0.5) == pytest.approx(0.9)

    def test_balducci_half_year(self) -> None:
        p = AnnualSurvival(40, (0.9,))
        assert faa_survival(p, FaaKind.BALDUCCI, 0.5) == pytest.approx(0.9 / 0.95)

    @pytest.mark.parametrize("kind", ALL_KINDS)
    def test_integer_times_reproduce_products(self, survival_at, kind) -> None:
        p = survival_at(60, 10)
        for j in range(11):
            assert faa_survival(p, kind, float(j)) == pytest.approx(
                p.cumulative(j), abs=1e-12
            )

    @pytest.mark.parametrize("prob", [0.5, 0.8, 0.9, 0.99])
    def test_ordering_udd_cfm_balducci(self, prob: float) -> None:
        """Within a year the three curves order as UDD >= CFM >= Balducci."""
        p = AnnualSurvival(40, (prob,))
        t = 0.01
        while t < 1.0:
            udd = faa_survival(p, FaaKind.UDD, t)
            cfm = faa_survival(p, FaaKind.CFM, t)
            bal = faa_survival(p, FaaKind.BALDUCCI, t)
            assert udd >= cfm - 1e-15
            assert cfm >= bal - 1e-15
            t += 0.01

    @pytest.mark.parametrize("kind", ALL_KINDS)
    def test_non_increasing_in_time(self, survival_at, kind) -> None:
        p = survival_at(80, 5)
        previous = 1.0
        for i in range(501):
            value = faa_survival(p, kind, i * 0.01)
            assert value <= previous + 1e-15
            previous = value

    def test_horizon_exceeded(self, survival_at) -> None:
        p = survival_at(60, 5)
        with pytest.raises(HorizonExceeded):
            faa_survival(p, FaaKind.CFM, 5.5)

    @given(
        prob=st.floats(min_value=0.01, max_value=1.0),
        t=st.floats(min_value=0.0, max_value=1.0),
        kind=st.sampled_from(ALL_KINDS),
    )
    @settings(max_examples=100, deadline=None)
    def test_stays_in_unit_interval(self, prob, t, kind) -> None:
        p = AnnualSurvival(40, (prob,))
        value = faa_survival(p, kind, t)
        assert 0.0 < value <= 1.0


class TestFaaHazard:
    def test_cfm_constant_force(self) -> None:
        p = AnnualSurvival(40, (math.exp(-0.02),))
        for t in (0.0, 0.3, 0.99):
            assert faa_hazard(p, FaaKind.CFM, t) == pytest.approx(0.02)

    def test_udd_start_of_year(self) -> None:
        p = AnnualSurvival(40, (0.99,))
        assert faa_hazard(p, FaaKind.UDD, 0.0) == pytest.approx(0.01)

    def test_balducci_end_of_year(self) -> None:
        p = AnnualSurvival(40, (0.9,))
        assert faa_hazard(p, FaaKind.BALDUCCI, 1.0 - 1e-12) == pytest.approx(
            0.1, rel=1e-9
        )

    def test_right_limit_at_integers(self, survival_at) -> None:
        """At an integer the hazard is the next year's start-of-year value."""
        p = survival_at(60, 3)
        value = faa_hazard(p, FaaKind.UDD, 1.0)
        assert value == pytest.approx(1.0 - p.probs[1], rel=1e-12)

    def test_at_horizon_rejected(self, survival_at) -> None:
        p = survival_at(60, 3)
        with pytest.raises(HorizonExceeded):
            faa_hazard(p, FaaKind.CFM, 3.0)

    @pytest.mark.parametrize("kind", ALL_KINDS)
    def test_yearly_integral_identity(self, survival_at, kind) -> None:
        """Integrating the hazard over a year recovers -log(annual survival)."""
        p = survival_at(75, 4)
        for year in range(4):
            integral, _ = quad(
                lambda u: faa_hazard(p, kind, year + u), 0.0, 1.0, limit=200
            )
            assert integral == pytest.approx(-math.log(p.probs[year]), abs=1e-8)

    @pytest.mark.parametrize("kind", ALL_KINDS)
    def test_exponential_of_integral_matches_survival(self, survival_at, kind) -> None:
        p = survival_at(70, 3)
        for t in (0.4, 1.0, 1.7, 2.9):
            integral, _ = quad(
                lambda u: faa_hazard(p, kind, u), 0.0, t, limit=200,
                points=[1.0, 2.0] if t > 1 else None,
            )
            assert math.exp(-integral) == pytest.approx(
                faa_survival(p, kind, t), abs=1e-8
            )
