from fastapi import APIRouter, Depends, HTTPException, status
from typing import Callable, Optional

from ..core.errors import InvalidParameters, PricingError
from ..models.schemas import (
    ConvergenceReport,
    DigitalReport,
    ErrorResponse,
    HedgeReport,
    InvarianceReport,
    PriceReport,
    ScenarioSchema,
    WalkReport,
)
from ..services.engine import PricingEngine

router = APIRouter(prefix="/api/pricing", tags=["pricing"])


def get_pricing_engine() -> PricingEngine:
    return PricingEngine()


def error_detail(e: PricingError) -> dict:
    return ErrorResponse(error=e.code, details=e.to_dict()).model_dump()


def run_command(command: Callable, *args, **kwargs):
    """Map engine errors to HTTP errors"""
    try:
        return command(*args, **kwargs)
    except InvalidParameters as e:
        raise HTTPException(
            status_code=status.HTTP_422_UNPROCESSABLE_ENTITY,
            detail=error_detail(e),
        )
    except PricingError as e:
        raise HTTPException(
            status_code=status.HTTP_400_BAD_REQUEST,
            detail=error_detail(e),
        )


# Pricing endpoints
@router.post("/price", response_model=PriceReport)
def price(
    scenario: ScenarioSchema,
    verify: bool = False,
    engine: PricingEngine = Depends(get_pricing_engine),
):
    """Price the scenario payoff at t = 0"""
    return run_command(engine.price, scenario, verify=verify)


@router.post("/hedge", response_model=HedgeReport)
def hedge(
    scenario: ScenarioSchema,
    trajectory: Optional[str] = None,
    engine: PricingEngine = Depends(get_pricing_engine),
):
    """Hedge ledger of a path AD security"""
    return run_command(engine.hedge, scenario, trajectory)


@router.post("/digital", response_model=DigitalReport)
def digital(scenario: ScenarioSchema, engine: PricingEngine = Depends(get_pricing_engine)):
    return run_command(engine.digital, scenario)


@router.post("/invariance", response_model=InvarianceReport)
def invariance(
    scenario: ScenarioSchema,
    counterexample: bool = False,
    engine: PricingEngine = Depends(get_pricing_engine),
):
    """Per-time sums of the value grid"""
    return run_command(engine.invariance, scenario, counterexample=counterexample)


@router.post("/converge", response_model=ConvergenceReport)
def converge(scenario: ScenarioSchema, engine: PricingEngine = Depends(get_pricing_engine)):
    return run_command(engine.converge, scenario)


@router.post("/walk", response_model=WalkReport)
def walk(scenario: ScenarioSchema, engine: PricingEngine = Depends(get_pricing_engine)):
    """Exact and simulated backward-walk hit probability"""
    return run_command(engine.walk, scenario)
