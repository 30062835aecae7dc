"""
Lattice asymptotics of the BSM model

U = exp(mu dt + sigma sqrt(dt)), D = exp(mu dt - sigma sqrt(dt)), R = exp(r dt).
The drift mu enters q but drops out of the risk-neutral mean exactly and out of
the risk-neutral variance as dt -> 0.

Expanding RU + RD - UD - R^2 to second order gives
    sigma^2 dt + dt^2 (sigma^2 (mu + r) + sigma^4 / 12 - (mu - r)^2).
risk_neutral_variance_approx keeps only the sigma^2 (mu + r) part of the dt^2
term; variance_slope_coefficient returns the full first-order coefficient of
variance_exact / (T sigma^2) - 1.
"""

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import List, Sequence

import numpy as np
import structlog
from scipy import integrate, stats

from config import settings

from ..core.errors import InvalidParameters, NoArbitrageViolated
from ..core.lattice import LatticeParams, to_nominal
from ..core.payoffs import Call
from .digital_pricing import price_european_crr

logger = structlog.get_logger(__name__)


@dataclass(frozen=True)
class BsmParams:
    mu: float
    sigma: float
    r: float
    horizon: float
    dt: float

    def __post_init__(self):
        if not self.sigma > 0:
            raise InvalidParameters("sigma must be positive", field="sigma")
        if not self.horizon > 0:
            raise InvalidParameters("horizon must be positive", field="horizon")
        if not 0 < self.dt <= self.horizon:
            raise InvalidParameters("dt must lie in (0, horizon]", field="dt")

    @property
    def steps(self) -> int:
        return max(1, round(self.horizon / self.dt))

    @property
    def up(self) -> float:
        return math.exp(self.mu * self.dt + self.sigma * math.sqrt(self.dt))

    @property
    def down(self) -> float:
        return math.exp(self.mu * self.dt - self.sigma * math.sqrt(self.dt))

    @property
    def gross_rate(self) -> float:
        return math.exp(self.r * self.dt)

    def with_steps(self, n: int) -> "BsmParams":
        return replace(self, dt=self.horizon / n)


def risk_neutral_weight(bsm: BsmParams) -> float:
    """q = (R - D) / (U - D)"""
    up, down, gross = bsm.up, bsm.down, bsm.gross_rate
    if not down < gross < up:
        raise NoArbitrageViolated(
            "lattice requires D < R < U", field="mu", D=down, R=gross, U=up
        )
    return (gross - down) / (up - down)


def map_to_lattice(bsm: BsmParams, s0: float) -> LatticeParams:
    risk_neutral_weight(bsm)
    return LatticeParams(
        s0=s0,
        u=bsm.up - 1,
        d=bsm.down - 1,
        r=bsm.gross_rate - 1,
        steps=bsm.steps,
        recombining_strict=bsm.mu == 0,
    )


def risk_neutral_step_mean(bsm: BsmParams) -> float:
    """qU + (1-q)D, which equals R whatever mu is"""
    q = risk_neutral_weight(bsm)
    return q * bsm.up + (1 - q) * bsm.down


def risk_neutral_second_moment(bsm: BsmParams) -> float:
    q = risk_neutral_weight(bsm)
    return q * bsm.up**2 + (1 - q) * bsm.down**2


def second_moment_identity(bsm: BsmParams) -> float:
    """RU + RD - UD"""
    up, down, gross = bsm.up, bsm.down, bsm.gross_rate
    return gross * up + gross * down - up * down


def per_step_variance(bsm: BsmParams) -> float:
    """q (U - R)^2 + (1-q) (D - R)^2"""
    q = risk_neutral_weight(bsm)
    gross = bsm.gross_rate
    return q * (bsm.up - gross) ** 2 + (1 - q) * (bsm.down - gross) ** 2


def risk_neutral_variance_exact(bsm: BsmParams) -> float:
    """(T / dt) (RU + RD - UD - R^2)"""
    risk_neutral_weight(bsm)
    gross = bsm.gross_rate
    return bsm.horizon / bsm.dt * (second_moment_identity(bsm) - gross**2)


def risk_neutral_variance_approx(bsm: BsmParams) -> float:
    """T sigma^2 (1 + (mu + r) dt)"""
    return bsm.horizon * bsm.sigma**2 * (1 + (bsm.mu + bsm.r) * bsm.dt)


def variance_slope_coefficient(bsm: BsmParams) -> float:
    """d/d(dt) of variance_exact / (T sigma^2) at dt = 0"""
    return (bsm.mu + bsm.r) + bsm.sigma**2 / 12 - (bsm.mu - bsm.r) ** 2 / bsm.sigma**2


def fit_variance_slope(bsm: BsmParams, dts: Sequence[float], exact: bool = True) -> float:
    """Least-squares slope of variance / (T sigma^2) - 1 against dt"""
    if len(dts) < 2:
        raise InvalidParameters("a slope needs at least two time steps", field="dts")
    variance = risk_neutral_variance_exact if exact else risk_neutral_variance_approx
    scale = bsm.horizon * bsm.sigma**2
    ys = [variance(replace(bsm, dt=dt)) / scale - 1 for dt in dts]
    slope, _ = np.polyfit(np.asarray(dts, dtype=float), np.asarray(ys), 1)
    return float(slope)


def dq_dmu(bsm: BsmParams) -> float:
    """-sqrt(dt) / (2 sigma), the small-dt drift sensitivity of q"""
    return -math.sqrt(bsm.dt) / (2 * bsm.sigma)


def dq_dmu_exact(bsm: BsmParams) -> float:
    """Derivative of the exact q: -dt R exp(-mu dt) / (2 sinh(sigma sqrt(dt)))"""
    risk_neutral_weight(bsm)
    return (
        -bsm.dt
        * bsm.gross_rate
        * math.exp(-bsm.mu * bsm.dt)
        / (2 * math.sinh(bsm.sigma * math.sqrt(bsm.dt)))
    )


def dq_dmu_central_difference(bsm: BsmParams, h: float = 1e-6) -> float:
    plus = risk_neutral_weight(replace(bsm, mu=bsm.mu + h))
    minus = risk_neutral_weight(replace(bsm, mu=bsm.mu - h))
    return (plus - minus) / (2 * h)


def dx_adjustment(bsm: BsmParams, dmu: float) -> float:
    """Up-jump count shift -T dmu / (2 sigma sqrt(dt)) offsetting a drift change"""
    return -bsm.horizon * dmu / (2 * bsm.sigma * math.sqrt(bsm.dt))


def log_terminal_shift(bsm: BsmParams, dmu: float) -> float:
    """Change of log S_T at a fixed node when the drift moves by dmu"""
    return bsm.horizon * dmu


def bsm_call_reference(s0: float, strike: float, bsm: BsmParams) -> float:
    """Closed-form Black-Scholes call, nominal"""
    horizon, sigma, r = bsm.horizon, bsm.sigma, bsm.r
    discount = math.exp(-r * horizon)
    if strike <= 0:
        return s0 - strike * discount
    vol = sigma * math.sqrt(horizon)
    d1 = (math.log(s0 / strike) + (r + 0.5 * sigma**2) * horizon) / vol
    d2 = d1 - vol
    return s0 * stats.norm.cdf(d1) - strike * discount * stats.norm.cdf(d2)


def bsm_call_by_quadrature(s0: float, strike: float, bsm: BsmParams) -> float:
    """e^(-rT) E[(s0 e^Y - K)^+] with Y ~ N((r - sigma^2/2) T, sigma^2 T)"""
    horizon, sigma, r = bsm.horizon, bsm.sigma, bsm.r
    mean = (r - 0.5 * sigma**2) * horizon
    std = sigma * math.sqrt(horizon)
    lower = math.log(strike / s0) if strike > 0 else -np.inf

    def integrand(y):
        return (s0 * math.exp(y) - strike) * stats.norm.pdf(y, loc=mean, scale=std)

    value, _ = integrate.quad(integrand, lower, mean + 12 * std, epsabs=1e-12, epsrel=1e-12)
    return math.exp(-r * horizon) * value


@dataclass(frozen=True)
class ConvergenceRow:
    n: int
    dt: float
    crr_price: float
    bsm_price: float
    abs_error: float


def crr_call_price(s0: float, strike: float, bsm: BsmParams) -> float:
    """Nominal CRR call on the BSM-mapped lattice"""
    lattice = map_to_lattice(bsm, s0)
    return float(to_nominal(price_european_crr(lattice, Call(strike)), lattice))


def convergence_study(
    s0: float, strike: float, bsm: BsmParams, step_counts: Sequence[int]
) -> List[ConvergenceRow]:
    """CRR call against the closed form for each step count n (dt = T / n)"""
    if any(n < 1 for n in step_counts):
        raise InvalidParameters("step counts must be positive", field="step_counts")
    reference = bsm_call_reference(s0, strike, bsm)

    def row(n: int) -> ConvergenceRow:
        refined = bsm.with_steps(n)
        price = crr_call_price(s0, strike, refined)
        return ConvergenceRow(n, refined.dt, price, reference, abs(price - reference))

    with ThreadPoolExecutor(max_workers=settings.max_workers) as pool:
        rows = list(pool.map(row, step_counts))

    for item in rows:
        logger.debug("convergence_row", n=item.n, abs_error=item.abs_error)
    return rows
