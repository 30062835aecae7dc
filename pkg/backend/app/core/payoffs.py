"""
Payoff specifications

Terminal payoffs look only at S_T; path payoffs see the full price path
S_0..S_T and the move sequence. Values are in time-T numeraire units.
"""

import math
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import Dict, Mapping, Sequence, Tuple

from .errors import InvalidParameters, TrajectoryLengthMismatch
from .lattice import Number, accumulate, coerce_like, same_price


def _check_level(name: str, value):
    if not math.isfinite(float(value)) or value < 0:
        raise InvalidParameters(f"{name} must be finite and non-negative", field=name)


class Payoff(ABC):
    path_dependent: bool = False

    @abstractmethod
    def payout(self, prices: Sequence[Number], moves: Tuple[int, ...]) -> Number:
        """Value at maturity for a price path and its moves"""


class TerminalPayoff(Payoff):
    @abstractmethod
    def terminal(self, price: Number) -> Number:
        """Value at maturity for terminal price S_T"""

    def payout(self, prices, moves):
        return self.terminal(prices[-1])


class PathPayoff(Payoff):
    path_dependent = True


def _zero(reference):
    return coerce_like(0.0, reference)


@dataclass(frozen=True)
class Call(TerminalPayoff):
    strike: Number

    def __post_init__(self):
        _check_level("strike", self.strike)

    def terminal(self, price):
        return max(price - coerce_like(self.strike, price), _zero(price))


@dataclass(frozen=True)
class Put(TerminalPayoff):
    strike: Number

    def __post_init__(self):
        _check_level("strike", self.strike)

    def terminal(self, price):
        return max(coerce_like(self.strike, price) - price, _zero(price))


@dataclass(frozen=True)
class DigitalAt(TerminalPayoff):
    """Degenerate digital: 1 iff S_T is the strike node"""

    strike: Number

    def __post_init__(self):
        _check_level("strike", self.strike)

    def terminal(self, price):
        hit = same_price(price, self.strike)
        return coerce_like(1.0 if hit else 0.0, price)


@dataclass(frozen=True)
class DigitalInterval(TerminalPayoff):
    """1 iff k1 <= S_T <= k2"""

    k1: Number
    k2: Number

    def __post_init__(self):
        _check_level("k1", self.k1)
        _check_level("k2", self.k2)
        if self.k2 < self.k1:
            raise InvalidParameters("k2 must not be below k1", field="k2")

    def terminal(self, price):
        inside = (price >= self.k1 or same_price(price, self.k1)) and (
            price <= self.k2 or same_price(price, self.k2)
        )
        return coerce_like(1.0 if inside else 0.0, price)


@dataclass(frozen=True)
class Constant(TerminalPayoff):
    """value units of the bond maturing at T"""

    value: Number

    def __post_init__(self):
        if not math.isfinite(float(self.value)):
            raise InvalidParameters("value must be finite", field="value")

    def terminal(self, price):
        return coerce_like(self.value, price)


@dataclass(frozen=True)
class Underlying(TerminalPayoff):
    """The asset itself, f(S_T) = S_T"""

    def terminal(self, price):
        return price


@dataclass(frozen=True)
class TableTerminal(TerminalPayoff):
    """Explicit map terminal price -> value, 0 off the table"""

    values: Tuple[Tuple[Number, Number], ...]

    def __post_init__(self):
        entries = self.values.items() if isinstance(self.values, Mapping) else self.values
        entries = tuple((k, v) for k, v in entries)
        for price, _ in entries:
            _check_level("price", price)
        object.__setattr__(self, "values", entries)

    def terminal(self, price):
        for node, value in self.values:
            if same_price(price, node):
                return coerce_like(value, price)
        return _zero(price)


@dataclass(frozen=True)
class BarrierOption(PathPayoff):
    """Inner payoff activated (knock in) or cancelled (knock out) by touching level

    Monitoring covers S_0..S_T; touching means reaching the level inclusively.
    """

    level: Number
    direction: str
    inner: Payoff
    knock: str = "in"

    def __post_init__(self):
        _check_level("level", self.level)
        if self.direction not in ("up", "down"):
            raise InvalidParameters("direction must be up or down", field="direction")
        if self.knock not in ("in", "out"):
            raise InvalidParameters("knock must be in or out", field="knock")

    def touched(self, prices) -> bool:
        if self.direction == "up":
            extreme = max(prices)
            return extreme >= self.level or same_price(extreme, self.level)
        extreme = min(prices)
        return extreme <= self.level or same_price(extreme, self.level)

    def payout(self, prices, moves):
        active = self.touched(prices) == (self.knock == "in")
        if not active:
            return _zero(prices[-1])
        return self.inner.payout(prices, moves)


@dataclass(frozen=True)
class AsianArithmetic(PathPayoff):
    """Fixed-strike call on the arithmetic mean of S_1..S_T"""

    strike: Number

    def __post_init__(self):
        _check_level("strike", self.strike)

    def payout(self, prices, moves):
        monitored = prices[1:]
        average = accumulate(monitored) / len(monitored)
        average = coerce_like(average, prices[-1])
        return max(average - coerce_like(self.strike, prices[-1]), _zero(prices[-1]))


@dataclass(frozen=True)
class Lookback(PathPayoff):
    """Floating-strike lookback: S_T - min S (call) or max S - S_T (put)"""

    style: str = "call"

    def __post_init__(self):
        if self.style not in ("call", "put"):
            raise InvalidParameters("style must be call or put", field="style")

    def payout(self, prices, moves):
        if self.style == "call":
            return prices[-1] - min(prices)
        return max(prices) - prices[-1]


@dataclass(frozen=True)
class TablePath(PathPayoff):
    """Explicit map trajectory -> value, keyed by move strings like '101'

    Every key must have T moves. Trajectories missing from the table pay 0.
    """

    values: Dict[str, Number] = field(default_factory=dict)

    def __post_init__(self):
        cleaned = {}
        for key, value in dict(self.values).items():
            moves = key if isinstance(key, str) else "".join(str(int(m)) for m in key)
            moves = moves.replace(",", "")
            if any(c not in "01" for c in moves):
                raise InvalidParameters(f"bad trajectory key {key!r}", field="values")
            cleaned[moves] = value
        object.__setattr__(self, "values", cleaned)

    def __hash__(self):
        return hash(tuple(sorted(self.values.items())))

    def payout(self, prices, moves):
        stray = sorted(k for k in self.values if len(k) != len(moves))
        if stray:
            raise TrajectoryLengthMismatch(
                f"table keys {stray} do not have {len(moves)} moves", field="values"
            )
        key = "".join(str(m) for m in moves)
        return coerce_like(self.values.get(key, 0), prices[-1])


@dataclass(frozen=True)
class Combination(Payoff):
    """Weighted sum of payoffs; path dependent if any leg is"""

    legs: Tuple[Tuple[Number, Payoff], ...]

    def __post_init__(self):
        object.__setattr__(self, "legs", tuple((w, p) for w, p in self.legs))

    @property
    def path_dependent(self) -> bool:
        return any(p.path_dependent for _, p in self.legs)

    def terminal(self, price):
        return self._sum(
            [coerce_like(w, price) * p.terminal(price) for w, p in self.legs], price
        )

    def payout(self, prices, moves):
        reference = prices[-1]
        return self._sum(
            [coerce_like(w, reference) * p.payout(prices, moves) for w, p in self.legs],
            reference,
        )

    @staticmethod
    def _sum(terms, reference):
        if not terms:
            return _zero(reference)
        return coerce_like(accumulate(terms), reference)


def is_terminal(payoff: Payoff) -> bool:
    return not payoff.path_dependent and hasattr(payoff, "terminal")


def terminal_value(payoff: Payoff, price: Number) -> Number:
    """f(S_T) for any payoff that does not need the path"""
    return payoff.terminal(price)
