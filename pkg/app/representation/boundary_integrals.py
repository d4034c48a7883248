import logging
import math
from typing import Callable, NamedTuple, Optional, Tuple

from app import settings
from app.analytic.core import HarmonicFunction, growth_rate
from app.domain.core import (
    BandDomain,
    CurveKind,
    PointClass,
    arc_element,
    classify_point,
    exterior_normal,
    kernel_decay_rate,
)
from app.kernel.core import KernelParams, Point2
from app.kernel.functions import eval_grad_phi_y, eval_phi
from app.quadrature.core import IntegralResult, QuadratureConfig, integrate_finite
from app.quadrature.truncation import truncation_radius
from app.services.errors import AccuracyError, ClassificationError, KernelDomainError
from .core import CauchyTrace, ReconstructionReport

__all__ = [
    "CurveIntegral",
    "required_truncation",
    "curve_integral",
    "reconstruct",
    "green_identity_value",
]

logger = logging.getLogger(__name__)

# Near-boundary points get this many times the subdivision budget.
_REFINEMENT_FACTOR = 4
# Inner Phi quadratures run this much tighter than the boundary integral around them.
_INNER_TIGHTENING = 100.0


class CurveIntegral(NamedTuple):
    value: float
    error_estimate: float
    evaluations: int
    converged: bool


class _PhiCache:
    """
    Phi evaluations for one source point. The inner quadrature runs _INNER_TIGHTENING times tighter than
    the outer one; an inner result only counts as failed when it misses the outer tolerance.
    """

    def __init__(self, x: Point2, params: KernelParams, quad: QuadratureConfig):
        self.x = x
        self.params = params
        self.quad = quad
        self.inner = quad.copy(
            update={"abs_tol": quad.abs_tol / _INNER_TIGHTENING, "rel_tol": quad.rel_tol / _INNER_TIGHTENING}
        )
        self.max_error = 0.0
        self.converged = True

    def phi(self, y: Point2) -> float:
        try:
            result = eval_phi(y, self.x, self.params, self.inner)
        except AccuracyError as e:
            result = e.result
            if result.error_estimate > self.quad.tolerance_for(result.value):
                logger.debug(f"Inner quadrature not converged at y={tuple(y)}: {e.message}")
                self.converged = False
        self.max_error = max(self.max_error, result.error_estimate)
        return result.value


def _check_setup(domain: BandDomain, params: KernelParams) -> float:
    if not math.isclose(domain.h, params.h, rel_tol=1e-12):
        raise KernelDomainError(f"Domain band width {domain.h} does not match kernel h = pi/rho = {params.h}")
    return kernel_decay_rate(domain, params)


def required_truncation(
        x: Point2, domain: BandDomain, params: KernelParams, quad: QuadratureConfig, c: float
) -> float:
    return truncation_radius(params, c, x[0], quad.rel_tol, decay_rate=_check_setup(domain, params))


def _breakpoints(domain: BandDomain, curve: CurveKind, x: Point2) -> Tuple[float, ...]:
    # the kernel peaks at y1 = x1 with a width set by the distance from x to the curve
    distance = abs(x[1] - domain.curve(curve).f(x[0]))
    width = min(domain.h, max(4 * distance, 1e-6))
    return x[0] - width, x[0], x[0] + width


def _integrate_curve(
        integrand: Callable[[float], float], weight: Callable[[float], float], domain: BandDomain,
        curve: CurveKind, x: Point2, Y: float, quad: QuadratureConfig, cache: _PhiCache
) -> CurveIntegral:
    outer = integrate_finite(integrand, -Y, Y, quad, points=_breakpoints(domain, curve, x))
    # inner (Phi) errors propagate through the L1 mass of the data
    mass = integrate_finite(lambda t: abs(weight(t)) * arc_element(domain, curve, t), -Y, Y, quad)
    error = outer.error_estimate + cache.max_error * abs(mass.value)
    converged = outer.converged and cache.converged
    if not converged:
        logger.warning(
            f"Boundary integral over {curve.value} not converged for x={tuple(x)}: "
            f"value={outer.value!r}, error={error!r}"
        )
    return CurveIntegral(outer.value, error, outer.evaluations, converged)


def curve_integral(
        x: Point2, domain: BandDomain, trace: CauchyTrace, params: KernelParams, quad: QuadratureConfig, Y: float
) -> CurveIntegral:
    """I_j(x) = -int_{gamma_j} Phi(y, x) dU/dn(y) ds over y1 in [-Y, Y]."""
    if trace.is_zero:
        return CurveIntegral(0.0, 0.0, 0, True)
    trace.check_coverage(Y)
    curve = trace.curve
    cache = _PhiCache(x, params, quad)
    f = domain.curve(curve).f

    def integrand(t):
        return -cache.phi(Point2(t, f(t))) * trace(t) * arc_element(domain, curve, t)

    return _integrate_curve(integrand, trace.values, domain, curve, x, Y, quad, cache)


def reconstruct(
        x: Point2, domain: BandDomain, trace1: CauchyTrace, trace2: CauchyTrace, params: KernelParams,
        quad: QuadratureConfig, truncation_Y: Optional[float] = None
) -> ReconstructionReport:
    """
    U(x) = -(I1 + I2) with I_j = -int_{gamma_j} Phi(y, x) dU/dn ds, for x strictly inside the domain.
    Both integrals run over y1 in [-Y, Y], Y = truncation_radius at the relative tolerance quad.rel_tol
    unless truncation_Y is given. The report is certified only when the data grow slower than exp(rho |y1| / 2).
    """
    x = Point2(*x)
    if trace1.curve != CurveKind.LOWER or trace2.curve != CurveKind.UPPER:
        raise ClassificationError("trace1 must live on the lower curve and trace2 on the upper curve")
    classification = classify_point(domain, x)
    if classification != PointClass.INSIDE:
        raise ClassificationError(
            f"Reconstruction needs x strictly inside the domain; x={tuple(x)} is {classification.value}",
            classification=classification,
        )
    c = max(trace1.growth_rate_c, trace2.growth_rate_c)
    Y = required_truncation(x, domain, params, quad, c)
    if truncation_Y is not None:
        if not truncation_Y > 0:
            raise KernelDomainError(f"truncation_Y must be positive, got {truncation_Y!r}")
        Y = truncation_Y
    first = curve_integral(x, domain, trace1, params, quad, Y)
    second = curve_integral(x, domain, trace2, params, quad, Y)
    return ReconstructionReport(
        x=tuple(x),
        value=-(first.value + second.value),
        I1=first.value,
        I2=second.value,
        truncation_Y=Y,
        quad_error=first.error_estimate + second.error_estimate,
        classification=classification,
        converged=first.converged and second.converged,
        certified=c < params.rho / 2,
    )


def green_identity_value(
        x: Point2, domain: BandDomain, fn: HarmonicFunction, params: KernelParams, quad: QuadratureConfig
) -> IntegralResult:
    """
    int_{dD} (Phi dU/dn - U dPhi/dn) ds with exterior normals: U(x) for x inside D, 0 for x outside.

    Near-boundary points are integrated with a larger subdivision budget; the converged flag of the
    result reports whether the requested accuracy was reached.
    """
    x = Point2(*x)
    classification = classify_point(domain, x)
    if classification == PointClass.NEAR_BOUNDARY:
        logger.warning(f"x={tuple(x)} is within {settings.NEAR_BOUNDARY_TOL} of the boundary; refining quadrature.")
        quad = quad.copy(update={"max_subdivisions": quad.max_subdivisions * _REFINEMENT_FACTOR})
    Y = required_truncation(x, domain, params, quad, growth_rate(fn))
    total, error, evaluations, converged = 0.0, 0.0, 0, True
    for curve in (CurveKind.LOWER, CurveKind.UPPER):
        cache = _PhiCache(x, params, quad)
        f = domain.curve(curve).f

        def integrand(t, curve=curve, cache=cache, f=f):
            y = Point2(t, f(t))
            nx, ny = exterior_normal(domain, curve, t)
            gx, gy = fn.gradient(y)
            dphi_x, dphi_y = eval_grad_phi_y(y, x, params)
            flux = cache.phi(y) * (gx * nx + gy * ny) - fn.value(y) * (dphi_x * nx + dphi_y * ny)
            return flux * arc_element(domain, curve, t)

        def weight(t, curve=curve, f=f):
            gx, gy = fn.gradient(Point2(t, f(t)))
            nx, ny = exterior_normal(domain, curve, t)
            return gx * nx + gy * ny

        part = _integrate_curve(integrand, weight, domain, curve, x, Y, quad, cache)
        total += part.value
        error += part.error_estimate
        evaluations += part.evaluations
        converged = converged and part.converged
    converged = converged and error <= quad.tolerance_for(total) + quad.rel_tol * _data_scale(fn, x)
    return IntegralResult(total, error, evaluations, converged)


def _data_scale(fn: HarmonicFunction, x: Point2) -> float:
    gx, gy = fn.gradient(x)
    return abs(fn.value(x)) + math.hypot(gx, gy)
