"""
Binomial market primitives

Prices live in time-T numeraire units: one unit is the payoff of the zero-coupon
bond maturing at T. Nominal currency is recovered with to_nominal.

All arithmetic is generic over float and Fraction: a LatticeParams built with
LatticeParams.exact keeps every derived quantity rational.
"""

import itertools
import math
from dataclasses import dataclass
from enum import IntEnum
from fractions import Fraction
from numbers import Real
from typing import Iterable, Iterator, List, Optional, Tuple, Union

import structlog

from config import settings

from .errors import EnumerationCapExceeded, InvalidParameters, TrajectoryLengthMismatch

logger = structlog.get_logger(__name__)

Number = Union[float, Fraction]


class Move(IntEnum):
    DOWN = 0
    UP = 1


def exact_number(value) -> Fraction:
    """Convert a decimal-looking number to the rational it was written as"""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    return Fraction(repr(float(value)))


def coerce_like(value, reference):
    """Bring value into the arithmetic of reference (exact or float)"""
    if isinstance(reference, Fraction) and not isinstance(value, Fraction):
        return exact_number(value)
    return value


def accumulate(values: Iterable) -> Number:
    """Sum with fsum for floats, exactly for rationals"""
    values = list(values)
    if values and all(isinstance(v, (int, Fraction)) for v in values):
        return sum(values, Fraction(0))
    return math.fsum(float(v) for v in values)


def same_price(a: Real, b: Real, rel_tol: Optional[float] = None) -> bool:
    """Lattice node match on log-price"""
    tol = settings.strike_rel_tol if rel_tol is None else rel_tol
    a, b = float(a), float(b)
    if a <= 0 or b <= 0:
        return a == b
    return abs(math.log(a / b)) <= tol


@dataclass(frozen=True)
class LatticeParams:
    """The binomial market (s0, u, d, r, T, p)"""

    s0: Number
    u: Number
    d: Number
    r: Number
    steps: int
    p: Optional[Number] = None
    recombining_strict: bool = False

    def __post_init__(self):
        if isinstance(self.steps, bool) or not isinstance(self.steps, int):
            raise InvalidParameters("steps must be an integer", field="steps")
        if self.steps < 1:
            raise InvalidParameters("steps must be at least 1", field="steps")
        for name in ("s0", "u", "d", "r"):
            value = getattr(self, name)
            if not math.isfinite(float(value)):
                raise InvalidParameters(f"{name} must be finite", field=name)
        if self.s0 <= 0:
            raise InvalidParameters("s0 must be positive", field="s0")
        if self.d <= -1:
            raise InvalidParameters("d must exceed -1", field="d")
        if self.u <= self.d:
            raise InvalidParameters("u must exceed d", field="u")
        if self.p is not None and not 0 < self.p < 1:
            raise InvalidParameters("p must lie in (0, 1)", field="p")
        if self.recombining_strict:
            gap = (1 + self.d) * (1 + self.u) - 1
            if abs(float(gap)) > settings.recombining_tol:
                raise InvalidParameters(
                    "recombining_strict requires (1+d)(1+u) = 1",
                    field="recombining_strict",
                    gap=float(gap),
                )

    @classmethod
    def exact(
        cls,
        s0,
        u,
        d,
        r,
        steps: int,
        p=None,
        recombining_strict: bool = False,
    ) -> "LatticeParams":
        """Rational-mode market; limited to exact_max_steps steps"""
        if steps > settings.exact_max_steps:
            raise InvalidParameters(
                f"exact mode supports at most {settings.exact_max_steps} steps",
                field="steps",
            )
        return cls(
            s0=exact_number(s0),
            u=exact_number(u),
            d=exact_number(d),
            r=exact_number(r),
            steps=steps,
            p=None if p is None else exact_number(p),
            recombining_strict=recombining_strict,
        )

    @property
    def is_exact(self) -> bool:
        return isinstance(self.s0, Fraction)

    def node_price(self, ups: int, downs: int) -> Number:
        """s0 (1+u)^ups (1+d)^downs; negative exponents allowed"""
        return self.s0 * (1 + self.u) ** ups * (1 + self.d) ** downs

    def terminal_nodes(self) -> List[Number]:
        """Terminal prices indexed by up-count x = 0..T"""
        return [self.node_price(x, self.steps - x) for x in range(self.steps + 1)]

    def growth(self) -> Number:
        """One-period bond growth factor 1+r"""
        return 1 + self.r


@dataclass(frozen=True)
class Trajectory:
    """Sample point omega = (theta_1, ..., theta_T), 1 = up"""

    moves: Tuple[int, ...]

    def __post_init__(self):
        moves = tuple(int(m) for m in self.moves)
        if not moves:
            raise InvalidParameters("trajectory must contain at least one move", field="moves")
        if any(m not in (0, 1) for m in moves):
            raise InvalidParameters("moves must be 0 or 1", field="moves")
        object.__setattr__(self, "moves", moves)

    @classmethod
    def parse(cls, text: str) -> "Trajectory":
        """Parse '1,0,1' or '101'"""
        cleaned = text.replace(",", "").replace(" ", "")
        if not cleaned or any(c not in "01" for c in cleaned):
            raise InvalidParameters(f"cannot parse trajectory {text!r}", field="trajectory")
        return cls(tuple(int(c) for c in cleaned))

    @property
    def ups(self) -> int:
        return sum(self.moves)

    def __len__(self) -> int:
        return len(self.moves)

    def key(self) -> str:
        return "".join(str(m) for m in self.moves)


@dataclass(frozen=True)
class NumerairePrice:
    """A value in time-t numeraire units"""

    value: Number
    t: int = 0


def check_trajectory(params: LatticeParams, trajectory: Trajectory):
    if len(trajectory) != params.steps:
        raise TrajectoryLengthMismatch(
            f"trajectory has {len(trajectory)} moves, market has {params.steps} steps",
            field="trajectory",
        )


def price_path(params: LatticeParams, trajectory: Trajectory) -> Tuple[Number, ...]:
    """S_0, ..., S_T along the trajectory"""
    check_trajectory(params, trajectory)
    prices = [params.s0]
    for move in trajectory.moves:
        factor = 1 + (params.u if move == Move.UP else params.d)
        prices.append(prices[-1] * factor)
    return tuple(prices)


def terminal_price(params: LatticeParams, trajectory: Trajectory) -> Number:
    """S_T, which depends only on the up-count"""
    check_trajectory(params, trajectory)
    x = trajectory.ups
    return params.node_price(x, params.steps - x)


def evaluate_payoff(payoff, params: LatticeParams, trajectory: Trajectory) -> Number:
    """Payoff of the trajectory in time-T numeraire units"""
    return payoff.payout(price_path(params, trajectory), trajectory.moves)


def check_time(params: LatticeParams, t: int):
    if not 0 <= t <= params.steps:
        raise InvalidParameters(f"time {t} outside [0, {params.steps}]", field="t")


def to_nominal(price: NumerairePrice, params: LatticeParams) -> Number:
    """value (1+r)^(t-T)"""
    check_time(params, price.t)
    return price.value * params.growth() ** (price.t - params.steps)


def from_nominal(nominal: Number, t: int, params: LatticeParams) -> NumerairePrice:
    check_time(params, t)
    return NumerairePrice(nominal * params.growth() ** (params.steps - t), t)


def check_enumerable(steps: int):
    if steps > settings.enumeration_cap:
        raise EnumerationCapExceeded(
            f"{steps} steps exceed the enumeration cap of {settings.enumeration_cap}",
            field="steps",
        )


def enumerate_trajectories(params: LatticeParams) -> Iterator[Trajectory]:
    """All 2^T trajectories, last move varying fastest"""
    check_enumerable(params.steps)
    logger.debug("enumerate_trajectories", steps=params.steps, paths=2**params.steps)
    for moves in itertools.product((0, 1), repeat=params.steps):
        yield Trajectory(moves)
