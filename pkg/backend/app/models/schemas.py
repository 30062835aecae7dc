from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator
from typing import Annotated, Any, Dict, List, Literal, Optional, Union

from ..core import payoffs
from ..core.lattice import LatticeParams, Trajectory

Level = Annotated[float, Field(ge=0, allow_inf_nan=False)]


# Base schemas
class ErrorResponse(BaseModel):
    success: bool = False
    error: str
    details: Optional[Dict[str, Any]] = None


# Payoff schemas
class CallSchema(BaseModel):
    kind: Literal["Call"]
    strike: Level

    def to_domain(self) -> payoffs.Payoff:
        return payoffs.Call(self.strike)


class PutSchema(BaseModel):
    kind: Literal["Put"]
    strike: Level

    def to_domain(self) -> payoffs.Payoff:
        return payoffs.Put(self.strike)


class DigitalAtSchema(BaseModel):
    kind: Literal["DigitalAt"]
    strike: Level

    def to_domain(self) -> payoffs.Payoff:
        return payoffs.DigitalAt(self.strike)


class DigitalIntervalSchema(BaseModel):
    kind: Literal["DigitalInterval"]
    k1: Level
    k2: Level

    @model_validator(mode="after")
    def check_order(self):
        if self.k2 < self.k1:
            raise ValueError("k2 must not be below k1")
        return self

    def to_domain(self) -> payoffs.Payoff:
        return payoffs.DigitalInterval(self.k1, self.k2)


class BarrierOptionSchema(BaseModel):
    kind: Literal["BarrierOption"]
    level: Level
    direction: Literal["up", "down"]
    knock: Literal["in", "out"] = "in"
    inner: "PayoffSchema"

    def to_domain(self) -> payoffs.Payoff:
        return payoffs.BarrierOption(
            self.level, self.direction, self.inner.to_domain(), self.knock
        )


class AsianArithmeticSchema(BaseModel):
    kind: Literal["AsianArithmetic"]
    strike: Level

    def to_domain(self) -> payoffs.Payoff:
        return payoffs.AsianArithmetic(self.strike)


class LookbackSchema(BaseModel):
    kind: Literal["Lookback"]
    style: Literal["call", "put"] = "call"

    def to_domain(self) -> payoffs.Payoff:
        return payoffs.Lookback(self.style)


class TablePathSchema(BaseModel):
    kind: Literal["TablePath"]
    values: Dict[str, float] = Field(default_factory=dict)

    @field_validator("values")
    @classmethod
    def validate_keys(cls, v):
        for key in v:
            if not key or any(c not in "01," for c in key):
                raise ValueError(f"trajectory key {key!r} must be a 0/1 string")
        return v

    def to_domain(self) -> payoffs.Payoff:
        return payoffs.TablePath(dict(self.values))


class TableTerminalSchema(BaseModel):
    kind: Literal["TableTerminal"]
    values: Dict[str, float] = Field(default_factory=dict)

    @field_validator("values")
    @classmethod
    def validate_prices(cls, v):
        for key in v:
            try:
                price = float(key)
            except ValueError:
                raise ValueError(f"terminal price key {key!r} is not a number")
            if price < 0:
                raise ValueError(f"terminal price key {key!r} is negative")
        return v

    def to_domain(self) -> payoffs.Payoff:
        return payoffs.TableTerminal(tuple((float(k), v) for k, v in self.values.items()))


class ConstantSchema(BaseModel):
    kind: Literal["Constant"]
    value: float = Field(allow_inf_nan=False)

    def to_domain(self) -> payoffs.Payoff:
        return payoffs.Constant(self.value)


class UnderlyingSchema(BaseModel):
    kind: Literal["Underlying"]

    def to_domain(self) -> payoffs.Payoff:
        return payoffs.Underlying()


class LegSchema(BaseModel):
    weight: float = Field(allow_inf_nan=False)
    payoff: "PayoffSchema"


class CombinationSchema(BaseModel):
    kind: Literal["Combination"]
    legs: List[LegSchema]

    def to_domain(self) -> payoffs.Payoff:
        return payoffs.Combination(tuple((leg.weight, leg.payoff.to_domain()) for leg in self.legs))


PayoffSchema = Annotated[
    Union[
        CallSchema,
        PutSchema,
        DigitalAtSchema,
        DigitalIntervalSchema,
        BarrierOptionSchema,
        AsianArithmeticSchema,
        LookbackSchema,
        TablePathSchema,
        TableTerminalSchema,
        ConstantSchema,
        UnderlyingSchema,
        CombinationSchema,
    ],
    Field(discriminator="kind"),
]

BarrierOptionSchema.model_rebuild()
LegSchema.model_rebuild()
CombinationSchema.model_rebuild()


# Market schemas
class BsmSchema(BaseModel):
    mu: float = Field(allow_inf_nan=False)
    sigma: float = Field(gt=0, allow_inf_nan=False)
    r: float = Field(allow_inf_nan=False)
    horizon: float = Field(gt=0, allow_inf_nan=False)
    dt: float = Field(gt=0, allow_inf_nan=False)

    @model_validator(mode="after")
    def check_step(self):
        if self.dt > self.horizon:
            raise ValueError("dt must not exceed horizon")
        return self


class ScenarioSchema(BaseModel):
    """A market (flat lattice fields or a bsm block), a payoff and command options"""

    model_config = ConfigDict(extra="forbid")

    s0: float = Field(gt=0, allow_inf_nan=False)
    u: Optional[float] = Field(None, allow_inf_nan=False)
    d: Optional[float] = Field(None, gt=-1, allow_inf_nan=False)
    r: Optional[float] = Field(None, allow_inf_nan=False)
    steps: Optional[int] = Field(None, ge=1)
    p: Optional[float] = Field(None, gt=0, lt=1)
    recombining_strict: bool = False
    exact: bool = False
    bsm: Optional[BsmSchema] = None
    payoff: Optional[PayoffSchema] = None

    # Command options
    seed: Optional[int] = Field(None, ge=0)
    mc_paths: Optional[int] = Field(None, ge=1)
    step_counts: Optional[List[int]] = None
    strikes: Optional[List[Level]] = None
    trajectory: Optional[str] = None

    @field_validator("step_counts")
    @classmethod
    def validate_step_counts(cls, v):
        if v is not None and any(n < 1 for n in v):
            raise ValueError("step counts must be positive")
        return v

    @field_validator("trajectory")
    @classmethod
    def validate_trajectory(cls, v):
        if v is not None and (not v.replace(",", "") or any(c not in "01," for c in v)):
            raise ValueError("trajectory must be a 0/1 string such as '1,0,1'")
        return v

    @model_validator(mode="after")
    def check_market(self):
        lattice_fields = [self.u, self.d, self.r, self.steps]
        has_lattice = any(f is not None for f in lattice_fields)
        if has_lattice == (self.bsm is not None):
            raise ValueError("provide exactly one market: lattice fields or bsm")
        if has_lattice and any(f is None for f in lattice_fields):
            raise ValueError("lattice markets need u, d, r and steps")
        return self

    @property
    def is_lattice(self) -> bool:
        return self.bsm is None

    def lattice(self) -> LatticeParams:
        build = LatticeParams.exact if self.exact else LatticeParams
        return build(
            s0=self.s0,
            u=self.u,
            d=self.d,
            r=self.r,
            steps=self.steps,
            p=self.p,
            recombining_strict=self.recombining_strict,
        )

    def domain_payoff(self) -> Optional[payoffs.Payoff]:
        return None if self.payoff is None else self.payoff.to_domain()

    def domain_trajectory(self) -> Optional[Trajectory]:
        return None if self.trajectory is None else Trajectory.parse(self.trajectory)


# Report schemas
class PriceReport(BaseModel):
    numeraire: float
    nominal: float
    exact_numeraire: Optional[str] = None
    exact_nominal: Optional[str] = None
    method: str
    steps: int
    verify_delta: Optional[float] = None


class HedgeRow(BaseModel):
    time: int
    instrument: Optional[str] = None
    shares: float
    wealth: float


class HedgeReport(BaseModel):
    trajectory: str
    q: float
    price: float
    rows: List[HedgeRow]


class DigitalReport(BaseModel):
    strike: float
    strike_index: int
    closed_form: float
    from_ad: Optional[float] = None
    backward_walk: float
    exact: Optional[str] = None
    warnings: List[str] = Field(default_factory=list)


class InvarianceRow(BaseModel):
    t: int
    total: float


class InvarianceReport(BaseModel):
    strikes: List[float]
    payoff_mass: float
    rows: List[InvarianceRow]
    counterexample: Optional[List[float]] = None


class ConvergenceRowSchema(BaseModel):
    n: int
    dt: float
    crr_price: float
    bsm_price: float
    abs_error: float


class SensitivityReport(BaseModel):
    dq_dmu: float
    dq_dmu_exact: float
    dq_dmu_central_difference: float
    dx_adjustment: float
    dmu: float


class ConvergenceReport(BaseModel):
    rows: List[ConvergenceRowSchema]
    approx_slope: Optional[float] = None
    exact_slope: Optional[float] = None
    mu_plus_r: float
    slope_coefficient: float
    sensitivity: SensitivityReport
    warnings: List[str] = Field(default_factory=list)


class WalkReport(BaseModel):
    exact: float
    estimate: float
    std_error: float
    mc_paths: int
    seed: int


# Health check schema
class HealthCheckResponse(BaseModel):
    status: str
    service: str
