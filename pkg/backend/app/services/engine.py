from dataclasses import asdict
from fractions import Fraction
from typing import List, Optional, Sequence

import structlog

from config import settings

from ..core.errors import InvalidParameters
from ..core.lattice import LatticeParams, Trajectory, to_nominal
from ..core.payoffs import Call, Constant, DigitalAt, Payoff, is_terminal
from ..models.schemas import (
    ConvergenceReport,
    ConvergenceRowSchema,
    DigitalReport,
    HedgeReport,
    HedgeRow,
    InvarianceReport,
    InvarianceRow,
    PriceReport,
    ScenarioSchema,
    SensitivityReport,
    WalkReport,
)
from . import backward_walk, bsm_asymptotics, digital_pricing, static_hedging
from .bsm_asymptotics import BsmParams

logger = structlog.get_logger(__name__)

DEFAULT_STEP_COUNTS = [16, 64, 256, 1024]
DEFAULT_DMU = 0.01


def _exact_text(value) -> Optional[str]:
    return str(value) if isinstance(value, Fraction) else None


class PricingEngine:
    """Runs the pricing commands on a validated scenario"""

    def market(self, scenario: ScenarioSchema) -> LatticeParams:
        if scenario.is_lattice:
            return scenario.lattice()
        return bsm_asymptotics.map_to_lattice(self.bsm(scenario), scenario.s0)

    def bsm(self, scenario: ScenarioSchema) -> BsmParams:
        if scenario.bsm is None:
            raise InvalidParameters("this command needs a bsm market", field="bsm")
        return BsmParams(**scenario.bsm.model_dump())

    def payoff(self, scenario: ScenarioSchema) -> Payoff:
        payoff = scenario.domain_payoff()
        if payoff is None:
            raise InvalidParameters("scenario has no payoff", field="payoff")
        return payoff

    def digital_strike(self, scenario: ScenarioSchema) -> float:
        payoff = self.payoff(scenario)
        if not isinstance(payoff, DigitalAt):
            raise InvalidParameters("this command needs a DigitalAt payoff", field="payoff")
        return payoff.strike

    # Pricing
    def price(self, scenario: ScenarioSchema, verify: bool = False) -> PriceReport:
        """Numeraire and nominal price at t = 0"""
        params = self.market(scenario)
        payoff = self.payoff(scenario)
        digital_pricing.check_digital_strikes(params, payoff)

        if is_terminal(payoff):
            method = "crr"
            price = digital_pricing.price_european_crr(params, payoff)
        else:
            method = "path_enumeration"
            price = static_hedging.price_path_dependent(params, payoff)
        nominal = to_nominal(price, params)

        delta = None
        if verify:
            delta = digital_pricing.verify_price(params, payoff, price.value)

        logger.info("price", method=method, steps=params.steps, numeraire=float(price.value))
        return PriceReport(
            numeraire=float(price.value),
            nominal=float(nominal),
            exact_numeraire=_exact_text(price.value),
            exact_nominal=_exact_text(nominal),
            method=method,
            steps=params.steps,
            verify_delta=delta,
        )

    def hedge(self, scenario: ScenarioSchema, trajectory: Optional[str] = None) -> HedgeReport:
        """Backward AD hedge ledger for one trajectory"""
        params = self.market(scenario)
        path = Trajectory.parse(trajectory) if trajectory else scenario.domain_trajectory()
        if path is None:
            raise InvalidParameters("hedge needs a trajectory", field="trajectory")

        ledger = static_hedging.hedge_ledger(params, path)
        weight = static_hedging.risk_neutral_q(params)
        return HedgeReport(
            trajectory=path.key(),
            q=float(weight.q),
            price=float(ledger[0].wealth),
            rows=[
                HedgeRow(
                    time=step.time,
                    instrument=step.instrument,
                    shares=float(step.shares),
                    wealth=float(step.wealth),
                )
                for step in ledger
            ],
        )

    def digital(self, scenario: ScenarioSchema) -> DigitalReport:
        """Degenerate digital priced three ways"""
        params = self.market(scenario)
        spec = digital_pricing.DigitalSpec.from_strike(params, self.digital_strike(scenario))
        closed = digital_pricing.price_digital(params, spec).value

        warnings = []
        from_ad = None
        if params.steps <= settings.enumeration_cap:
            from_ad = float(digital_pricing.digital_from_ad(params, spec).value)
        else:
            warnings.append(
                f"from_ad omitted: {params.steps} steps exceed the enumeration cap"
            )
            logger.warning("from_ad_omitted", steps=params.steps)

        config = backward_walk.BackwardWalkConfig(params, spec.strike)
        walk = backward_walk.backward_hit_probability(config)
        return DigitalReport(
            strike=float(spec.strike),
            strike_index=spec.strike_index,
            closed_form=float(closed),
            from_ad=from_ad,
            backward_walk=float(walk),
            exact=_exact_text(closed),
            warnings=warnings,
        )

    def invariance(
        self,
        scenario: ScenarioSchema,
        strikes: Optional[Sequence[float]] = None,
        counterexample: bool = False,
    ) -> InvarianceReport:
        """Per-time totals of the aggregated value grid"""
        params = self.market(scenario)
        payoff = scenario.domain_payoff()
        if payoff is None:
            payoff = Constant(1.0)

        if strikes is None:
            strikes = scenario.strikes
        if strikes is None:
            if isinstance(payoff, DigitalAt):
                strikes = [payoff.strike]
            else:
                strikes = [float(k) for k in backward_walk.terminal_strikes(params)]

        grid = backward_walk.build_value_grid(params, payoff, strikes)
        mass = sum(
            float(payoff.terminal(backward_walk.locate_state(params, k).price(params)))
            for k in strikes
        )
        rows = [
            InvarianceRow(t=t, total=float(backward_walk.invariance_sum(grid, t)))
            for t in range(params.steps + 1)
        ]

        pair = None
        if counterexample:
            bond, states = backward_walk.standard_crr_invariance_counterexample(params)
            pair = [float(bond), float(states)]
        return InvarianceReport(
            strikes=[float(k) for k in strikes],
            payoff_mass=mass,
            rows=rows,
            counterexample=pair,
        )

    def converge(
        self, scenario: ScenarioSchema, step_counts: Optional[List[int]] = None
    ) -> ConvergenceReport:
        """CRR to BSM convergence table, variance slopes and drift sensitivity"""
        bsm = self.bsm(scenario)
        payoff = scenario.domain_payoff()
        if payoff is None:
            strike = scenario.s0
        elif isinstance(payoff, Call):
            strike = payoff.strike
        else:
            raise InvalidParameters("converge prices a Call payoff", field="payoff")

        counts = step_counts or scenario.step_counts or DEFAULT_STEP_COUNTS
        rows = bsm_asymptotics.convergence_study(scenario.s0, strike, bsm, counts)

        warnings = []
        approx_slope = exact_slope = None
        dts = sorted({bsm.horizon / n for n in counts})
        if len(dts) < 2:
            warnings.append("slope omitted: needs at least two distinct step counts")
            logger.warning("slope_omitted", step_counts=counts)
        else:
            approx_slope = bsm_asymptotics.fit_variance_slope(bsm, dts, exact=False)
            exact_slope = bsm_asymptotics.fit_variance_slope(bsm, dts, exact=True)

        sensitivity = SensitivityReport(
            dq_dmu=bsm_asymptotics.dq_dmu(bsm),
            dq_dmu_exact=bsm_asymptotics.dq_dmu_exact(bsm),
            dq_dmu_central_difference=bsm_asymptotics.dq_dmu_central_difference(bsm),
            dx_adjustment=bsm_asymptotics.dx_adjustment(bsm, DEFAULT_DMU),
            dmu=DEFAULT_DMU,
        )
        return ConvergenceReport(
            rows=[ConvergenceRowSchema(**asdict(row)) for row in rows],
            approx_slope=approx_slope,
            exact_slope=exact_slope,
            mu_plus_r=bsm.mu + bsm.r,
            slope_coefficient=bsm_asymptotics.variance_slope_coefficient(bsm),
            sensitivity=sensitivity,
            warnings=warnings,
        )

    def walk(
        self,
        scenario: ScenarioSchema,
        mc_paths: Optional[int] = None,
        seed: Optional[int] = None,
    ) -> WalkReport:
        """Exact and Monte Carlo probability that the backward walk hits s0"""
        params = self.market(scenario)
        if seed is None:
            seed = settings.seed if scenario.seed is None else scenario.seed
        config = backward_walk.BackwardWalkConfig(
            params,
            self.digital_strike(scenario),
            mc_paths=mc_paths or scenario.mc_paths or settings.mc_paths,
            seed=seed,
        )
        exact = backward_walk.backward_hit_probability(config)
        estimate = backward_walk.simulate_backward_walk(config)
        return WalkReport(
            exact=float(exact),
            estimate=estimate.estimate,
            std_error=estimate.std_error,
            mc_paths=estimate.mc_paths,
            seed=estimate.seed,
        )
