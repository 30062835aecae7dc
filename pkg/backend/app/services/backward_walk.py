"""
Backward random walk on the extended state space

States are s0 (1+u)^k (1+d)^l. Started at a strike K at maturity, the walk
moves to K/(1+u) with mass q and to K/(1+d) with mass 1-q per step back in
time. The mass it puts on a state at time t is the time-t numeraire value of
the degenerate digital paying 1 at K, so the mass reaching s0 at t = 0 is the
digital's price.
"""

import math
from collections import defaultdict
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import structlog

from config import settings

from ..core.errors import (
    InvalidParameters,
    PathDependentPayoffRejected,
    StrikeOffLattice,
    Unreachable,
)
from ..core.lattice import (
    LatticeParams,
    Number,
    accumulate,
    coerce_like,
    same_price,
)
from ..core.payoffs import Constant, Payoff, is_terminal
from .digital_pricing import price_european_crr
from .static_hedging import RiskNeutralWeight, risk_neutral_q

logger = structlog.get_logger(__name__)


@dataclass(frozen=True, order=True)
class ExtendedState:
    """Exponent pair (k, l) of s0 (1+u)^k (1+d)^l

    With recombining_strict the pair is canonical: only one of k, l is
    non-zero and the net index m = k - l identifies the state.
    """

    k: int
    l: int

    @classmethod
    def canonical(cls, params: LatticeParams, k: int, l: int) -> "ExtendedState":
        if params.recombining_strict:
            m = k - l
            return cls(max(m, 0), max(-m, 0))
        return cls(k, l)

    @property
    def index(self) -> int:
        return self.k - self.l

    def price(self, params: LatticeParams) -> Number:
        return params.node_price(self.k, self.l)

    def label(self, params: LatticeParams) -> str:
        if params.recombining_strict:
            return str(self.index)
        return f"{self.k}:{self.l}"


def locate_state(
    params: LatticeParams, price: Number, horizon: Optional[int] = None
) -> ExtendedState:
    """Extended state carrying price

    Recombining lattices resolve any s0 (1+u)^m. Otherwise the price must be
    a node reached after horizon steps (default T).
    """
    if params.recombining_strict:
        if float(price) > 0:
            m = round(math.log(float(price) / float(params.s0)) / math.log(1 + float(params.u)))
            state = ExtendedState.canonical(params, m, 0)
            if same_price(state.price(params), price):
                return state
    else:
        horizon = params.steps if horizon is None else horizon
        for x in range(horizon + 1):
            if same_price(params.node_price(x, horizon - x), price):
                return ExtendedState(x, horizon - x)
    raise StrikeOffLattice(f"price {price} is not a lattice state", field="strike")


def _step_back(
    params: LatticeParams, weight: RiskNeutralWeight, mass: Dict[ExtendedState, Number]
) -> Dict[ExtendedState, Number]:
    moved: Dict[ExtendedState, List[Number]] = defaultdict(list)
    for state, value in mass.items():
        moved[ExtendedState.canonical(params, state.k - 1, state.l)].append(weight.q * value)
        moved[ExtendedState.canonical(params, state.k, state.l - 1)].append(
            weight.down * value
        )
    return {state: accumulate(parts) for state, parts in moved.items()}


def walk_distribution(
    params: LatticeParams, start: ExtendedState, steps: Optional[int] = None
) -> List[Dict[ExtendedState, Number]]:
    """Law of the backward walk after 0..steps steps"""
    weight = risk_neutral_q(params)
    steps = params.steps if steps is None else steps
    laws = [{start: coerce_like(1.0, weight.q)}]
    for _ in range(steps):
        laws.append(_step_back(params, weight, laws[-1]))
    return laws


@dataclass(frozen=True)
class BackwardWalkConfig:
    params: LatticeParams
    start: Number
    mc_paths: int = field(default_factory=lambda: settings.mc_paths)
    seed: int = field(default_factory=lambda: settings.seed)
    q: Number = field(init=False)

    def __post_init__(self):
        if self.mc_paths < 1:
            raise InvalidParameters("mc_paths must be at least 1", field="mc_paths")
        weight = risk_neutral_q(self.params)
        object.__setattr__(self, "q", weight.q)

    @property
    def steps(self) -> int:
        return self.params.steps


def _endpoints(config: BackwardWalkConfig, target: Optional[Number]):
    params = config.params
    target = params.s0 if target is None else target
    try:
        start = locate_state(params, config.start)
        goal = locate_state(params, target, horizon=0)
    except StrikeOffLattice as exc:
        raise Unreachable(str(exc), field="start") from exc
    return start, goal


def backward_hit_probability(
    config: BackwardWalkConfig, target: Optional[Number] = None
) -> Number:
    """P(Y_T = target), exact"""
    start, goal = _endpoints(config, target)
    law = walk_distribution(config.params, start)[-1]
    if goal not in law:
        raise Unreachable(
            f"walk from {config.start} cannot reach {goal} in {config.steps} steps",
            field="start",
        )
    return law[goal]


@dataclass(frozen=True)
class MonteCarloEstimate:
    estimate: float
    std_error: float
    mc_paths: int
    seed: int


def _hitting_up_counts(config: BackwardWalkConfig, start, goal) -> List[int]:
    """Numbers of undone up moves that land the walk on goal"""
    params = config.params
    return [
        j
        for j in range(config.steps + 1)
        if ExtendedState.canonical(params, start.k - j, start.l - (config.steps - j)) == goal
    ]


def _simulate_chunk(seed_seq, size: int, steps: int, q: float, hits: Sequence[int]) -> int:
    rng = np.random.default_rng(seed_seq)
    undone_ups = (rng.random((size, steps)) < q).sum(axis=1)
    return int(np.isin(undone_ups, hits).sum())


def simulate_backward_walk(
    config: BackwardWalkConfig, target: Optional[Number] = None
) -> MonteCarloEstimate:
    """Frequency estimate of P(Y_T = target)

    Paths are split into fixed-size chunks, each with its own child seed, so
    the estimate depends on the seed only and not on the thread count.
    """
    start, goal = _endpoints(config, target)
    hits = _hitting_up_counts(config, start, goal)
    if not hits:
        raise Unreachable(
            f"walk from {config.start} cannot reach the target in {config.steps} steps",
            field="start",
        )

    chunk = settings.mc_chunk_size
    sizes = [chunk] * (config.mc_paths // chunk)
    if config.mc_paths % chunk:
        sizes.append(config.mc_paths % chunk)
    seeds = np.random.SeedSequence(config.seed).spawn(len(sizes))
    logger.debug(
        "simulate_backward_walk", mc_paths=config.mc_paths, chunks=len(sizes), seed=config.seed
    )

    q = float(config.q)
    with ThreadPoolExecutor(max_workers=settings.max_workers) as pool:
        counts = pool.map(
            lambda job: _simulate_chunk(job[0], job[1], config.steps, q, hits),
            zip(seeds, sizes),
        )
        total = sum(counts)

    estimate = total / config.mc_paths
    std_error = math.sqrt(estimate * (1 - estimate) / config.mc_paths)
    return MonteCarloEstimate(estimate, std_error, config.mc_paths, config.seed)


@dataclass(frozen=True)
class ValueGrid:
    """(state, t) -> replication value in time-t numeraire units"""

    params: LatticeParams
    entries: Dict[Tuple[ExtendedState, int], Number]
    strikes: Tuple[Number, ...] = ()
    per_strike: Tuple["ValueGrid", ...] = ()

    def at(self, t: int) -> Dict[ExtendedState, Number]:
        return {state: value for (state, time), value in self.entries.items() if time == t}

    def support(self, t: int) -> List[ExtendedState]:
        return sorted(self.at(t))


def build_value_grid(
    params: LatticeParams, payoff: Payoff, strikes: Sequence[Number]
) -> ValueGrid:
    """Sum of per-strike digital grids weighted by f(K)"""
    if not is_terminal(payoff):
        raise PathDependentPayoffRejected(
            "value grids need a terminal-state payoff", field="payoff"
        )

    per_strike = []
    for strike in strikes:
        state = locate_state(params, strike)
        weight = payoff.terminal(state.price(params))
        entries = {}
        for back, law in enumerate(walk_distribution(params, state)):
            t = params.steps - back
            for s, mass in law.items():
                entries[(s, t)] = weight * mass
        per_strike.append(ValueGrid(params, entries, (strike,)))

    combined: Dict[Tuple[ExtendedState, int], List[Number]] = defaultdict(list)
    for grid in per_strike:
        for key, value in grid.entries.items():
            combined[key].append(value)

    logger.debug("build_value_grid", strikes=len(per_strike), entries=len(combined))
    return ValueGrid(
        params,
        {key: accumulate(values) for key, values in combined.items()},
        tuple(strikes),
        tuple(per_strike),
    )


def invariance_sum(grid: ValueGrid, t: int) -> Number:
    """Sum of grid values over all states at time t"""
    return accumulate(grid.at(t).values())


def standard_crr_invariance_counterexample(params: LatticeParams) -> Tuple[Number, int]:
    """(bond value at t = 0, number of terminal states)

    On the standard tree the bond is worth one unit while summing f(K) = 1
    over terminal states counts T + 1.
    """
    bond = price_european_crr(params, Constant(1.0)).value
    return bond, len(params.terminal_nodes())


def grid_rows(grid: ValueGrid) -> List[list]:
    """CSV rows (t, state, price, value) ordered by time then net index"""
    params = grid.params
    keys = sorted(grid.entries, key=lambda item: (item[1], item[0].index, item[0].k))
    return [
        [t, state.label(params), state.price(params), grid.entries[(state, t)]]
        for state, t in keys
    ]


def terminal_strikes(params: LatticeParams) -> List[Number]:
    return params.terminal_nodes()
