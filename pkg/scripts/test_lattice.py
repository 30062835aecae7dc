"""
Tests for lattice primitives and payoffs
"""

from fractions import Fraction

import pytest

from app.core.errors import (
    EnumerationCapExceeded,
    InvalidParameters,
    TrajectoryLengthMismatch,
)
from app.core.lattice import (
    LatticeParams,
    NumerairePrice,
    Trajectory,
    accumulate,
    enumerate_trajectories,
    evaluate_payoff,
    from_nominal,
    price_path,
    terminal_price,
    to_nominal,
)
from app.core.payoffs import (
    AsianArithmetic,
    BarrierOption,
    Call,
    Combination,
    Constant,
    DigitalAt,
    DigitalInterval,
    Lookback,
    Put,
    TablePath,
    TableTerminal,
    Underlying,
    is_terminal,
)


@pytest.fixture
def market():
    return LatticeParams(s0=100.0, u=0.2, d=-0.1, r=0.04, steps=2)


@pytest.fixture
def exact_market():
    return LatticeParams.exact(s0=100, u=0.2, d=-0.1, r=0.04, steps=2)


class TestLatticeParams:
    def test_terminal_nodes(self, market):
        assert market.terminal_nodes() == pytest.approx([81.0, 108.0, 144.0])

    def test_exact_nodes_are_rational(self, exact_market):
        assert exact_market.is_exact
        assert exact_market.terminal_nodes() == [Fraction(81), Fraction(108), Fraction(144)]

    @pytest.mark.parametrize(
        "overrides, field",
        [
            ({"steps": 0}, "steps"),
            ({"steps": 1.5}, "steps"),
            ({"s0": -1.0}, "s0"),
            ({"d": -1.0}, "d"),
            ({"u": -0.2}, "u"),
            ({"p": 1.0}, "p"),
            ({"r": float("nan")}, "r"),
        ],
    )
    def test_rejects_bad_parameters(self, overrides, field):
        values = dict(s0=100.0, u=0.2, d=-0.1, r=0.04, steps=2)
        values.update(overrides)
        with pytest.raises(InvalidParameters) as exc:
            LatticeParams(**values)
        assert exc.value.field == field

    def test_recombining_strict_checks_product(self):
        LatticeParams(s0=1.0, u=0.25, d=-0.2, r=0.05, steps=3, recombining_strict=True)
        with pytest.raises(InvalidParameters):
            LatticeParams(s0=1.0, u=0.2, d=-0.1, r=0.04, steps=3, recombining_strict=True)

    @pytest.mark.parametrize("steps", [1, 2, 5, 12])
    def test_recombining_terminal_prices(self, steps):
        exact = LatticeParams.exact(
            s0=100, u=0.25, d=-0.2, r=0.05, steps=steps, recombining_strict=True
        )
        approx = LatticeParams(
            s0=100.0, u=0.25, d=-0.2, r=0.05, steps=steps, recombining_strict=True
        )
        for x in range(steps + 1):
            path = Trajectory((1,) * x + (0,) * (steps - x))
            assert terminal_price(exact, path) == 100 * Fraction(5, 4) ** (2 * x - steps)
            assert terminal_price(approx, path) == pytest.approx(
                100 * 1.25 ** (2 * x - steps), rel=1e-12
            )

    def test_exact_mode_step_limit(self):
        with pytest.raises(InvalidParameters):
            LatticeParams.exact(s0=1, u=0.2, d=-0.1, r=0.04, steps=13)

    def test_real_world_probability_is_metadata(self, market):
        with_p = LatticeParams(s0=100.0, u=0.2, d=-0.1, r=0.04, steps=2, p=0.7)
        assert with_p.terminal_nodes() == market.terminal_nodes()


class TestTrajectories:
    def test_parse_forms(self):
        assert Trajectory.parse("1,0,1") == Trajectory.parse("101")
        assert Trajectory.parse("1,0,1").ups == 2

    @pytest.mark.parametrize("text", ["", "1,2", "abc"])
    def test_parse_rejects(self, text):
        with pytest.raises(InvalidParameters):
            Trajectory.parse(text)

    def test_price_path(self, market):
        prices = price_path(market, Trajectory((1, 0)))
        assert prices == pytest.approx((100.0, 120.0, 108.0))

    def test_terminal_price_depends_on_up_count(self, market):
        assert terminal_price(market, Trajectory((1, 0))) == pytest.approx(
            terminal_price(market, Trajectory((0, 1)))
        )

    def test_length_mismatch(self, market):
        with pytest.raises(TrajectoryLengthMismatch):
            price_path(market, Trajectory((1, 0, 1)))

    def test_enumeration_order_and_count(self):
        params = LatticeParams(s0=1.0, u=0.2, d=-0.1, r=0.04, steps=3)
        keys = [t.key() for t in enumerate_trajectories(params)]
        assert len(keys) == 8
        assert keys[:3] == ["000", "001", "010"]

    def test_enumeration_cap(self):
        params = LatticeParams(s0=1.0, u=0.2, d=-0.1, r=0.04, steps=26)
        with pytest.raises(EnumerationCapExceeded):
            next(enumerate_trajectories(params))


class TestNumeraire:
    def test_nominal_conversion(self, market):
        nominal = to_nominal(NumerairePrice(1.0816, 0), market)
        assert nominal == pytest.approx(1.0)

    def test_nominal_round_trip(self, market):
        price = from_nominal(5.0, 1, market)
        assert price.value == pytest.approx(5.2)
        assert to_nominal(price, market) == pytest.approx(5.0)

    def test_time_outside_horizon(self, market):
        with pytest.raises(InvalidParameters):
            to_nominal(NumerairePrice(1.0, 3), market)

    def test_exact_conversion(self, exact_market):
        assert to_nominal(NumerairePrice(Fraction(676, 625), 0), exact_market) == 1

    def test_accumulate_keeps_fractions(self):
        assert accumulate([Fraction(1, 3)] * 3) == 1
        assert accumulate([0.1] * 10) == 1.0
        assert accumulate([]) == 0


class TestPayoffs:
    def test_vanilla(self):
        assert Call(105).terminal(108.0) == pytest.approx(3.0)
        assert Call(105).terminal(81.0) == 0
        assert Put(105).terminal(81.0) == pytest.approx(24.0)

    def test_digitals_match_on_log_price(self):
        assert DigitalAt(108).terminal(100 * 1.2 * 0.9) == 1.0
        assert DigitalAt(108).terminal(108.01) == 0.0
        assert DigitalInterval(81, 108).terminal(108.0) == 1.0
        assert DigitalInterval(81, 108).terminal(144.0) == 0.0

    def test_digital_interval_order(self):
        with pytest.raises(InvalidParameters):
            DigitalInterval(108, 81)

    def test_negative_strike_rejected(self):
        with pytest.raises(InvalidParameters):
            Call(-1)

    def test_table_terminal(self):
        table = TableTerminal({81.0: 2.0, 144.0: 5.0})
        assert table.terminal(144.0) == 5.0
        assert table.terminal(108.0) == 0

    def test_exact_values_stay_exact(self):
        assert Call(105).terminal(Fraction(108)) == Fraction(3)
        assert DigitalAt(108).terminal(Fraction(108)) == Fraction(1)

    def test_barrier_knock_in_and_out(self, market):
        up_in = BarrierOption(120, "up", Call(100))
        up_out = BarrierOption(120, "up", Call(100), knock="out")
        through = Trajectory((1, 0))
        assert evaluate_payoff(up_in, market, through) == pytest.approx(8.0)
        assert evaluate_payoff(up_out, market, through) == 0
        assert evaluate_payoff(up_out, market, Trajectory((0, 1))) == pytest.approx(8.0)

    def test_barrier_monitors_start(self, market):
        touched_at_start = BarrierOption(100, "down", Constant(1.0))
        assert evaluate_payoff(touched_at_start, market, Trajectory((1, 1))) == 1.0

    def test_asian_averages_after_start(self, market):
        asian = AsianArithmetic(100)
        assert evaluate_payoff(asian, market, Trajectory((1, 0))) == pytest.approx(14.0)

    def test_lookback_styles(self, market):
        path = Trajectory((1, 0))
        assert evaluate_payoff(Lookback("call"), market, path) == pytest.approx(8.0)
        assert evaluate_payoff(Lookback("put"), market, path) == pytest.approx(12.0)

    def test_table_path(self, market):
        table = TablePath({"10": 3.0})
        assert evaluate_payoff(table, market, Trajectory((1, 0))) == 3.0
        assert evaluate_payoff(table, market, Trajectory((0, 1))) == 0

    @pytest.mark.parametrize("key", ["1", "101", "0,1,1"])
    def test_table_path_key_length_must_match_steps(self, market, key):
        table = TablePath({"10": 3.0, key: 1.0})
        with pytest.raises(TrajectoryLengthMismatch) as exc:
            evaluate_payoff(table, market, Trajectory((1, 0)))
        assert exc.value.field == "values"

    @pytest.mark.parametrize("steps", [1, 4, 12])
    @pytest.mark.parametrize(
        "build",
        [
            lambda p: Call(105),
            lambda p: Put(95),
            lambda p: DigitalAt(p.node_price(p.steps // 2, p.steps - p.steps // 2)),
            lambda p: DigitalInterval(90, 130),
            lambda p: Underlying(),
            lambda p: Constant(2),
            lambda p: Combination(((1, Call(100)), (-1, Put(100)))),
        ],
    )
    def test_terminal_payoffs_match_enumerated_table(self, steps, build):
        params = LatticeParams.exact(s0=100, u=0.2, d=-0.1, r=0.04, steps=steps)
        payoff = build(params)
        paths = list(enumerate_trajectories(params))
        table = TableTerminal(
            {terminal_price(params, t): payoff.terminal(terminal_price(params, t)) for t in paths}
        )
        for path in paths:
            assert evaluate_payoff(payoff, params, path) == evaluate_payoff(table, params, path)

    def test_combination(self, market):
        straddle = Combination(((1.0, Call(108)), (1.0, Put(108))))
        assert is_terminal(straddle)
        assert straddle.terminal(144.0) == pytest.approx(36.0)
        mixed = Combination(((1.0, Underlying()), (2.0, Lookback())))
        assert not is_terminal(mixed)
        assert evaluate_payoff(mixed, market, Trajectory((1, 0))) == pytest.approx(124.0)
