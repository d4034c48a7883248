import logging
import math
from typing import Optional

from scipy import optimize

from app import settings
from app.kernel.core import KernelParams
from app.services.errors import InternalError, KernelDomainError
from .core import IntegralResult, QuadratureConfig, integrate_finite

__all__ = ["reference_inner_integral", "truncation_radius", "tail_integral"]

logger = logging.getLogger(__name__)


def reference_inner_integral(r2: float, r1sq: float) -> float:
    """
    Closed form of the inner integral: int_0^inf u du / ((u^2 + r^2)(u^2 + r1^2)) = ln(r1^2/r^2) / (2(r1^2 - r^2)).
    """
    if not (math.isfinite(r2) and math.isfinite(r1sq)) or not 0 < r2 < r1sq:
        raise KernelDomainError(f"Inner integral needs 0 < r2 < r1sq, got r2={r2!r}, r1sq={r1sq!r}")
    gap = r1sq - r2
    # log1p keeps the r1sq -> r2 limit 1/(2 r2) accurate
    return math.log1p(gap / r2) / (2 * gap)


def truncation_radius(
        params: KernelParams, c: float, x1: float, tol: float, decay_rate: Optional[float] = None
) -> float:
    """
    Half-length Y of the boundary segment [-Y, Y] kept in the boundary integrals.

    T solves a1 ch(rho1 T) = c T + ln(1/tol) + margin, which bounds the tail of kernel decay against
    data growth exp(c |t|) relative to the data scale at x; Y = |x1| + T. decay_rate replaces a1 for
    domains whose curves leave the band.
    """
    rate = params.a1 if decay_rate is None else decay_rate
    if not rate > 0:
        raise InternalError(f"Kernel decay rate must be positive, got {rate!r}")
    if c < 0 or not tol > 0:
        raise KernelDomainError(f"Truncation needs c >= 0 and tol > 0, got c={c!r}, tol={tol!r}")
    if c >= params.rho / 2:
        logger.warning(
            f"Growth rate c={c} is not below rho/2={params.rho / 2}; truncation is best effort, not certified."
        )
    level = math.log(1.0 / tol) + settings.TRUNCATION_MARGIN

    def excess(t):
        return rate * math.cosh(params.rho1 * t) - c * t - level

    if excess(0.0) >= 0:
        return abs(x1)
    upper = 1.0
    while excess(upper) < 0:
        upper *= 2
    return abs(x1) + optimize.brentq(excess, 0.0, upper, xtol=1e-12)


def tail_integral(
        params: KernelParams, c: float, start: float, end: float, quad: QuadratureConfig,
        decay_rate: Optional[float] = None
) -> IntegralResult:
    """Quadrature of exp(c t - a1 ch(rho1 t)) (1 + ln(1 + 15 h^2 / t^2)) over [start, end], start > 0."""
    if not 0 < start <= end:
        raise KernelDomainError(f"Tail interval must satisfy 0 < start <= end, got [{start}, {end}]")
    rate = params.a1 if decay_rate is None else decay_rate
    h = params.h

    def integrand(t):
        return math.exp(c * t - rate * math.cosh(params.rho1 * t)) * (1 + math.log1p(15 * h * h / (t * t)))

    return integrate_finite(integrand, start, end, quad)
