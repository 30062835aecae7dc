"""
Domain errors raised by the pricing engine

Input errors derive from InvalidParameters; everything else is a domain error.
"""

from typing import Any, Dict, Optional


class PricingError(ValueError):
    """Base class for all pricing engine errors"""

    def __init__(self, message: str, field: Optional[str] = None, **details: Any):
        super().__init__(message)
        self.field = field
        self.details: Dict[str, Any] = dict(details)

    @property
    def code(self) -> str:
        return type(self).__name__

    def to_dict(self) -> Dict[str, Any]:
        payload: Dict[str, Any] = {"message": str(self)}
        if self.field:
            payload["field"] = self.field
        payload.update({k: str(v) for k, v in self.details.items()})
        return payload


class InvalidParameters(PricingError):
    """Malformed market, payoff or command input"""


class TrajectoryLengthMismatch(InvalidParameters):
    pass


class OutOfRange(PricingError):
    """Risk-neutral weight would leave (0, 1): d < r < u violated"""


class NoArbitrageViolated(PricingError):
    """BSM-mapped lattice violates D < R < U"""


class EnumerationCapExceeded(PricingError):
    pass


class StrikeOffLattice(PricingError):
    pass


class PathDependentPayoffRejected(PricingError):
    pass


class Unreachable(PricingError):
    """Backward walk cannot reach the target in the given number of steps"""
