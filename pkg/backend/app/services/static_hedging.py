"""
Arrow-Debreu replication by static hedging

AD_up pays one numeraire unit after an up move, AD_down after a down move.
A path-dependent AD security is hedged backward along its trajectory by
buying the one-step AD for each move; its price is q^x (1-q)^(T-x).
"""

from dataclasses import dataclass
from typing import List, Optional

import structlog

from ..core.errors import OutOfRange
from ..core.lattice import (
    LatticeParams,
    Move,
    Number,
    NumerairePrice,
    Trajectory,
    accumulate,
    check_trajectory,
    coerce_like,
    enumerate_trajectories,
    evaluate_payoff,
)
from ..core.payoffs import Payoff

logger = structlog.get_logger(__name__)

AD_UP = "AD_up"
AD_DOWN = "AD_down"


@dataclass(frozen=True)
class RiskNeutralWeight:
    """Up-state AD price q in numeraire units"""

    q: Number

    @property
    def down(self) -> Number:
        return 1 - self.q

    def weight(self, move: int) -> Number:
        return self.q if move == Move.UP else self.down


@dataclass(frozen=True)
class OneStepHedge:
    """a units of asset plus b units of the bank account B_0 = 1"""

    direction: Move
    a: Number
    b: Number
    cost: Number
    s0: Number
    u: Number
    d: Number
    r: Number

    def value_at(self, move: int) -> Number:
        """Portfolio value after one step"""
        factor = 1 + (self.u if move == Move.UP else self.d)
        return self.a * self.s0 * factor + self.b * (1 + self.r)

    @property
    def numeraire_cost(self) -> Number:
        return self.cost * (1 + self.r)


def risk_neutral_q(params: LatticeParams) -> RiskNeutralWeight:
    """q = (r - d) / (u - d)"""
    if not params.d < params.r < params.u:
        raise OutOfRange(
            "pricing requires d < r < u",
            field="r",
            d=params.d,
            r=params.r,
            u=params.u,
        )
    return RiskNeutralWeight((params.r - params.d) / (params.u - params.d))


def replicate_one_step(direction: Move, params: LatticeParams) -> OneStepHedge:
    """Solve a S_1 + b B_1 = AD payoff in both states"""
    risk_neutral_q(params)
    direction = Move(direction)
    spread = params.u - params.d
    growth = 1 + params.r
    if direction == Move.UP:
        a = 1 / (params.s0 * spread)
        b = -(1 + params.d) / (spread * growth)
    else:
        a = -1 / (params.s0 * spread)
        b = (1 + params.u) / (spread * growth)
    cost = a * params.s0 + b
    return OneStepHedge(
        direction=direction,
        a=a,
        b=b,
        cost=cost,
        s0=params.s0,
        u=params.u,
        d=params.d,
        r=params.r,
    )


def path_weight(weight: RiskNeutralWeight, ups: int, steps: int) -> Number:
    return weight.q**ups * weight.down ** (steps - ups)


def price_path_ad(params: LatticeParams, trajectory: Trajectory) -> NumerairePrice:
    """Price of the AD security paying 1 iff the trajectory occurs"""
    check_trajectory(params, trajectory)
    weight = risk_neutral_q(params)
    return NumerairePrice(path_weight(weight, trajectory.ups, params.steps), 0)


def price_path_dependent(params: LatticeParams, payoff: Payoff) -> NumerairePrice:
    """Sum of f(omega) q^x (1-q)^(T-x) over all 2^T trajectories"""
    weight = risk_neutral_q(params)
    by_ups = [path_weight(weight, x, params.steps) for x in range(params.steps + 1)]
    terms = [
        evaluate_payoff(payoff, params, trajectory) * by_ups[trajectory.ups]
        for trajectory in enumerate_trajectories(params)
    ]
    return NumerairePrice(accumulate(terms), 0)


@dataclass(frozen=True)
class HedgeStep:
    """Holding bought at time t and the wealth it costs"""

    time: int
    instrument: Optional[str]
    shares: Number
    wealth: Number


def hedge_ledger(params: LatticeParams, trajectory: Trajectory) -> List[HedgeStep]:
    """Backward hedge of the trajectory's AD security, listed from t = 0 to T

    Wealth at T is one unit. At each earlier t the hedger holds wealth(t+1)
    shares of the one-step AD for move t+1, which costs wealth(t).
    """
    check_trajectory(params, trajectory)
    weight = risk_neutral_q(params)

    wealth: Number = coerce_like(1.0, params.s0)
    steps = [
        HedgeStep(
            time=params.steps,
            instrument=None,
            shares=coerce_like(0.0, params.s0),
            wealth=wealth,
        )
    ]
    for t in range(params.steps - 1, -1, -1):
        move = trajectory.moves[t]
        shares = wealth
        wealth = shares * weight.weight(move)
        instrument = AD_UP if move == Move.UP else AD_DOWN
        steps.append(HedgeStep(time=t, instrument=instrument, shares=shares, wealth=wealth))

    logger.debug("hedge_ledger", steps=params.steps, trajectory=trajectory.key())
    return list(reversed(steps))


def ledger_rows(ledger: List[HedgeStep]) -> List[list]:
    """CSV rows (time, instrument, shares, wealth)"""
    return [
        [step.time, step.instrument or "", step.shares, step.wealth] for step in ledger
    ]
