"""
Degenerate digital options and the CRR European formula

Three independent routes to a European price are kept side by side so they
can check each other: the closed binomial sum, backward induction on the
tree, and aggregation of path AD securities.
"""

import itertools
import math
from dataclasses import dataclass
from typing import List, Optional

import numpy as np
import structlog
from scipy import stats

from config import settings

from ..core.errors import (
    InvalidParameters,
    PathDependentPayoffRejected,
    StrikeOffLattice,
)
from ..core.lattice import (
    LatticeParams,
    Number,
    NumerairePrice,
    Trajectory,
    accumulate,
    check_enumerable,
    check_time,
    coerce_like,
    enumerate_trajectories,
    evaluate_payoff,
    same_price,
)
from ..core.payoffs import BarrierOption, Combination, DigitalAt, Payoff, is_terminal
from .static_hedging import (
    RiskNeutralWeight,
    price_path_ad,
    price_path_dependent,
    risk_neutral_q,
)

logger = structlog.get_logger(__name__)


@dataclass(frozen=True)
class DigitalSpec:
    """Lattice node x_0 and its price K = s0 (1+u)^x0 (1+d)^(T-x0)"""

    strike_index: int
    strike: Number

    @classmethod
    def from_strike(cls, params: LatticeParams, strike: Number) -> "DigitalSpec":
        for x, node in enumerate(params.terminal_nodes()):
            if same_price(node, strike):
                return cls(strike_index=x, strike=node)
        raise StrikeOffLattice(
            f"strike {strike} is not a terminal lattice node",
            field="strike",
            nodes=[float(n) for n in params.terminal_nodes()],
        )

    @classmethod
    def from_index(cls, params: LatticeParams, strike_index: int) -> "DigitalSpec":
        if not 0 <= strike_index <= params.steps:
            raise StrikeOffLattice(
                f"strike index {strike_index} outside [0, {params.steps}]",
                field="strike_index",
            )
        return cls(strike_index, params.node_price(strike_index, params.steps - strike_index))


def _validate_spec(params: LatticeParams, spec: DigitalSpec):
    x0 = spec.strike_index
    if not 0 <= x0 <= params.steps or not same_price(
        params.node_price(x0, params.steps - x0), spec.strike
    ):
        raise StrikeOffLattice(
            f"strike {spec.strike} does not match node {x0}", field="strike"
        )


def check_digital_strikes(params: LatticeParams, payoff: Payoff):
    """Raise StrikeOffLattice if any DigitalAt in payoff misses the terminal nodes"""
    if isinstance(payoff, DigitalAt):
        DigitalSpec.from_strike(params, payoff.strike)
    elif isinstance(payoff, BarrierOption):
        check_digital_strikes(params, payoff.inner)
    elif isinstance(payoff, Combination):
        for _, leg in payoff.legs:
            check_digital_strikes(params, leg)


def binomial_weights(n: int, weight: RiskNeutralWeight) -> List[Number]:
    """C(n, x) q^x (1-q)^(n-x) for x = 0..n

    Exact integer coefficients up to binomial_exact_max_steps; beyond that the
    pmf is evaluated in log space to avoid underflow of q^x.
    """
    q = weight.q
    if n <= settings.binomial_exact_max_steps:
        return [math.comb(n, x) * q**x * weight.down ** (n - x) for x in range(n + 1)]
    return stats.binom.pmf(np.arange(n + 1), n, float(q)).tolist()


def price_digital(params: LatticeParams, spec: DigitalSpec) -> NumerairePrice:
    """C(T, x0) q^x0 (1-q)^(T-x0)"""
    _validate_spec(params, spec)
    weight = risk_neutral_q(params)
    return NumerairePrice(binomial_weights(params.steps, weight)[spec.strike_index], 0)


def price_european_crr(
    params: LatticeParams,
    payoff: Payoff,
    t: int = 0,
    x_so_far: int = 0,
) -> NumerairePrice:
    """CRR sum at valuation time t, given x_so_far up moves by t

    Weights are C(T-t, x) so that they form a probability mass.
    """
    if not is_terminal(payoff):
        raise PathDependentPayoffRejected(
            "the CRR formula needs a terminal-state payoff", field="payoff"
        )
    check_time(params, t)
    if not 0 <= x_so_far <= t:
        raise InvalidParameters(f"x_so_far {x_so_far} outside [0, {t}]", field="x_so_far")

    remaining = params.steps - t
    weight = risk_neutral_q(params)
    weights = binomial_weights(remaining, weight)
    terms = [
        weights[x] * payoff.terminal(params.node_price(x_so_far + x, params.steps - x_so_far - x))
        for x in range(remaining + 1)
    ]
    return NumerairePrice(accumulate(terms), t)


def backward_induction_price(params: LatticeParams, payoff: Payoff) -> NumerairePrice:
    """Roll q up + (1-q) down back to t = 0

    Terminal payoffs run on the recombining node grid; path payoffs on the
    full binary tree of 2^T leaves.
    """
    weight = risk_neutral_q(params)
    q, q_down = weight.q, weight.down

    if is_terminal(payoff):
        values = [payoff.terminal(node) for node in params.terminal_nodes()]
        for _ in range(params.steps):
            values = [q_down * values[x] + q * values[x + 1] for x in range(len(values) - 1)]
        return NumerairePrice(values[0], 0)

    check_enumerable(params.steps)
    values = [evaluate_payoff(payoff, params, traj) for traj in enumerate_trajectories(params)]
    for _ in range(params.steps):
        values = [q_down * values[2 * i] + q * values[2 * i + 1] for i in range(len(values) // 2)]
    return NumerairePrice(values[0], 0)


def digital_from_ad(params: LatticeParams, spec: DigitalSpec) -> NumerairePrice:
    """Aggregate the C(T, x0) path AD securities ending at the strike node"""
    _validate_spec(params, spec)
    check_enumerable(params.steps)
    prices = []
    for ups in itertools.combinations(range(params.steps), spec.strike_index):
        moves = [0] * params.steps
        for i in ups:
            moves[i] = 1
        prices.append(price_path_ad(params, Trajectory(tuple(moves))).value)
    logger.debug("digital_from_ad", strike_index=spec.strike_index, paths=len(prices))
    return NumerairePrice(accumulate(prices), 0)


def forward_minus_strike(params: LatticeParams, strike: Number) -> NumerairePrice:
    """Numeraire value of S_T - K: the asset grown to T less the strike"""
    forward = params.s0 * params.growth() ** params.steps
    return NumerairePrice(forward - coerce_like(strike, params.s0), 0)


def verify_price(params: LatticeParams, payoff: Payoff, value: Number) -> Optional[float]:
    """Largest deviation of the independent oracles from value"""
    oracles = [backward_induction_price(params, payoff).value]
    if params.steps <= settings.enumeration_cap:
        oracles.append(price_path_dependent(params, payoff).value)
    return max(abs(float(o) - float(value)) for o in oracles)
