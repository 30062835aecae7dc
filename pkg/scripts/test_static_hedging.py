"""
Tests for Arrow-Debreu replication and path pricing
"""

from fractions import Fraction

import pytest

from app.core.errors import OutOfRange, TrajectoryLengthMismatch
from app.core.lattice import LatticeParams, Move, Trajectory, enumerate_trajectories
from app.core.payoffs import Call, Constant, TablePath
from app.services.static_hedging import (
    AD_DOWN,
    AD_UP,
    hedge_ledger,
    ledger_rows,
    price_path_ad,
    price_path_dependent,
    replicate_one_step,
    risk_neutral_q,
)

Q = Fraction(7, 15)


@pytest.fixture
def market():
    return LatticeParams(s0=100.0, u=0.2, d=-0.1, r=0.04, steps=2)


@pytest.fixture
def exact_market():
    return LatticeParams.exact(s0=100, u=0.2, d=-0.1, r=0.04, steps=2)


class TestRiskNeutralWeight:
    def test_example_market(self, market, exact_market):
        assert risk_neutral_q(market).q == pytest.approx(7 / 15)
        assert risk_neutral_q(exact_market).q == Q

    @pytest.mark.parametrize("r", [-0.1, 0.2, 0.5, -0.3])
    def test_out_of_range(self, r):
        with pytest.raises(OutOfRange):
            risk_neutral_q(LatticeParams(s0=100.0, u=0.2, d=-0.1, r=r, steps=1))


class TestOneStepHedge:
    def test_up_security(self, market):
        hedge = replicate_one_step(Move.UP, market)
        assert hedge.a * market.s0 == pytest.approx(10 / 3)
        assert hedge.cost == pytest.approx(0.44872, abs=1e-5)
        assert hedge.numeraire_cost == pytest.approx(7 / 15)
        assert hedge.value_at(Move.UP) == pytest.approx(1.0)
        assert hedge.value_at(Move.DOWN) == pytest.approx(0.0, abs=1e-12)

    def test_down_security(self, market):
        hedge = replicate_one_step(Move.DOWN, market)
        assert hedge.a * market.s0 == pytest.approx(-10 / 3)
        assert hedge.cost == pytest.approx(0.51282, abs=1e-5)
        assert hedge.value_at(Move.UP) == pytest.approx(0.0, abs=1e-12)
        assert hedge.value_at(Move.DOWN) == pytest.approx(1.0)

    def test_exact_costs_sum_to_bond(self, exact_market):
        up = replicate_one_step(Move.UP, exact_market)
        down = replicate_one_step(Move.DOWN, exact_market)
        assert up.numeraire_cost + down.numeraire_cost == 1
        assert up.value_at(Move.DOWN) == 0

    def test_degenerate_market(self):
        with pytest.raises(OutOfRange):
            replicate_one_step(Move.UP, LatticeParams(s0=100.0, u=0.2, d=0.1, r=0.0, steps=1))


class TestPathPricing:
    def test_path_ad_price(self, exact_market):
        assert price_path_ad(exact_market, Trajectory((1, 0))).value == Q * (1 - Q)

    def test_path_ad_length(self, market):
        with pytest.raises(TrajectoryLengthMismatch):
            price_path_ad(market, Trajectory((1,)))

    def test_example_call(self, market, exact_market):
        assert price_path_dependent(market, Call(105)).value == pytest.approx(
            2247 / 225, abs=1e-12
        )
        assert price_path_dependent(exact_market, Call(105)).value == Fraction(2247, 225)

    def test_zero_payoff(self, market):
        assert price_path_dependent(market, Constant(0.0)).value == 0

    @pytest.mark.parametrize("steps", range(1, 13))
    def test_ad_prices_sum_to_one(self, steps):
        params = LatticeParams(s0=1.0, u=0.15, d=-0.05, r=0.01, steps=steps)
        total = sum(price_path_ad(params, t).value for t in enumerate_trajectories(params))
        assert total == pytest.approx(1.0, abs=1e-12)

    def test_single_path_table(self, exact_market):
        payoff = TablePath({"11": 1})
        assert price_path_dependent(exact_market, payoff).value == Q**2


class TestHedgeLedger:
    def test_three_step_ledger(self):
        params = LatticeParams.exact(s0=100, u=0.2, d=-0.1, r=0.04, steps=3)
        ledger = hedge_ledger(params, Trajectory.parse("0,0,1"))

        assert [step.time for step in ledger] == [0, 1, 2, 3]
        assert [step.wealth for step in ledger] == [Q * (1 - Q) ** 2, Q * (1 - Q), Q, 1]
        assert [step.instrument for step in ledger] == [AD_DOWN, AD_DOWN, AD_UP, None]

    def test_one_step_ledger(self, exact_market):
        params = LatticeParams.exact(s0=100, u=0.2, d=-0.1, r=0.04, steps=1)
        ledger = hedge_ledger(params, Trajectory((1,)))
        assert len(ledger) == 2
        assert ledger[0].wealth == Q

    @pytest.mark.parametrize("moves", list(enumerate_trajectories(
        LatticeParams(s0=1.0, u=0.2, d=-0.1, r=0.04, steps=4)
    )))
    def test_self_financing(self, moves):
        params = LatticeParams(s0=1.0, u=0.2, d=-0.1, r=0.04, steps=4)
        weight = risk_neutral_q(params)
        ledger = hedge_ledger(params, moves)

        for now, later in zip(ledger, ledger[1:]):
            move = moves.moves[now.time]
            assert now.shares == later.wealth
            assert now.wealth == pytest.approx(now.shares * weight.weight(move), abs=1e-12)
        assert ledger[0].wealth == pytest.approx(price_path_ad(params, moves).value, abs=1e-12)

    def test_ledger_rows(self, market):
        rows = ledger_rows(hedge_ledger(market, Trajectory((1, 1))))
        assert rows[0][:2] == [0, AD_UP]
        assert rows[-1][:2] == [2, ""]
