import cmath
import logging
import math
from typing import Optional, Tuple

from app import settings
from app.quadrature.core import IntegralResult, QuadratureConfig, integrate_semi_infinite
from app.services.errors import AccuracyError, KernelDomainError
from .core import KernelParams, Point2, kernel_geometry

__all__ = [
    "eval_K",
    "eval_K_at_anchor",
    "anchor_value",
    "integrand_terms",
    "phi_integrand_direct",
    "phi_integrand_decomposed",
    "eval_phi",
    "eval_grad_phi_y",
    "phi_upper_bound",
    "bound_ratio",
]

logger = logging.getLogger(__name__)

# Beyond this ch/sh argument the damping exp(-a cos(.) ch(.)) is exactly zero in double precision.
_MAX_CH_ARGUMENT = 700.0


def _shc(t: float) -> float:
    return 1.0 if abs(t) < 1e-8 else math.sinh(t) / t


def _sinc(theta: float) -> float:
    return 1.0 if theta == 0 else math.sin(theta) / theta


def _kernel_value(omega: complex, x2: float, params: KernelParams) -> complex:
    shifted = omega + 3 * params.h - x2
    if abs(shifted) < settings.POLE_TOLERANCE:
        raise KernelDomainError(f"omega={omega} is within {settings.POLE_TOLERANCE} of the pole x2 - 3h")
    return cmath.exp(-params.a * cmath.cos(params.rho1 * (omega - params.h / 2))) / shifted


def eval_K(omega: complex, x2: float, params: KernelParams) -> complex:
    """K(w) = (w + 3h - x2)^-1 exp(-a ch(i rho1 (w - h/2))); ch(i z) = cos z."""
    omega = complex(omega)
    if not (cmath.isfinite(omega) and math.isfinite(x2)):
        raise KernelDomainError(f"Non-finite kernel argument: omega={omega}, x2={x2}")
    if not 0 < x2 < params.h:
        raise KernelDomainError(f"x2={x2} must lie in the open band (0, {params.h})")
    return _kernel_value(omega, x2, params)


def anchor_value(x2: float, params: KernelParams) -> float:
    """K(x2) = (3h)^-1 exp(-a cos rho1 (x2 - h/2)), for any finite x2."""
    if not math.isfinite(x2):
        raise KernelDomainError(f"Non-finite anchor x2={x2}")
    return math.exp(-params.a * params.decay_cosine(x2)) / (3 * params.h)


def eval_K_at_anchor(x2: float, params: KernelParams) -> float:
    if not 0 < x2 < params.h:
        raise KernelDomainError(f"x2={x2} must lie in the open band (0, {params.h})")
    return anchor_value(x2, params)


class _PhiIntegrand:
    """Im[K(y2 + i eta) / (y2 - x2 + i eta)] * u / eta for a fixed pair (y, x); eta^2 = u^2 + alpha^2."""

    __slots__ = ("geometry", "y2", "a", "rho1", "half_h", "offset", "cos_phase", "sin_phase", "eta_switch")

    def __init__(self, y: Point2, x: Point2, params: KernelParams):
        self.geometry = kernel_geometry(y, x, params)
        self.y2 = y[1]
        self.a = params.a
        self.rho1 = params.rho1
        self.half_h = params.h / 2
        self.offset = 3 * params.h - x[1]
        phase = params.rho1 * (y[1] - self.half_h)
        self.cos_phase = math.cos(phase)
        self.sin_phase = math.sin(phase)
        self.eta_switch = settings.SMALL_ETA_FACTOR * params.h

    def eta(self, u: float) -> float:
        return math.sqrt(u * u + self.geometry.alpha2)

    def direct(self, u: float) -> float:
        eta = self.eta(u)
        if eta < self.eta_switch:
            return self.decomposed(u)
        if self.rho1 * eta > _MAX_CH_ARGUMENT:
            return 0.0
        w = complex(self.y2, eta)
        k = cmath.exp(-self.a * cmath.cos(self.rho1 * (w - self.half_h))) / (w + self.offset)
        return (k / complex(self.geometry.beta, eta)).imag * u / eta

    def terms(self, u: float) -> Tuple[float, float]:
        g = self.geometry
        eta = self.eta(u)
        t = self.rho1 * eta
        if t > _MAX_CH_ARGUMENT:
            return 0.0, 0.0
        damping = math.exp(-self.a * self.cos_phase * math.cosh(t))
        theta = self.a * self.sin_phase * math.sinh(t)
        # sin(theta)/eta stays finite as eta -> 0: theta/eta = a sin(.) rho1 sh(t)/t
        sin_theta_over_eta = self.a * self.sin_phase * self.rho1 * _shc(t) * _sinc(theta)
        scale = u * damping / ((u * u + g.r2) * (u * u + g.r1sq))
        first = (g.beta * g.beta1 - eta * eta) * sin_theta_over_eta * scale
        second = (g.beta + g.beta1) * math.cos(theta) * scale
        return first, second

    def decomposed(self, u: float) -> float:
        first, second = self.terms(u)
        return first - second


def _check_u(u: float):
    if not math.isfinite(u) or u < 0:
        raise KernelDomainError(f"Integration variable u must be finite and non-negative, got {u!r}")


def integrand_terms(u: float, y: Point2, x: Point2, params: KernelParams) -> Tuple[float, float]:
    """The two terms of the Im-part decomposition, each multiplied by u/eta (regular at eta = 0)."""
    _check_u(u)
    return _PhiIntegrand(y, x, params).terms(u)


def phi_integrand_direct(u: float, y: Point2, x: Point2, params: KernelParams) -> float:
    _check_u(u)
    return _PhiIntegrand(y, x, params).direct(u)


def phi_integrand_decomposed(u: float, y: Point2, x: Point2, params: KernelParams) -> float:
    _check_u(u)
    return _PhiIntegrand(y, x, params).decomposed(u)


def _check_pair(y: Point2, x: Point2, params: KernelParams, beta1: float):
    if not params.decay_cosine(y[1]) > 0:
        raise KernelDomainError(
            f"y2={y[1]} is outside the strip where the kernel decays (|y2 - h/2| < pi / (2 rho1))"
        )
    if not beta1 > 0:
        raise KernelDomainError(f"y2={y[1]} lies on or below the reflected pole line x2 - 3h = {x[1] - 3 * params.h}")


def eval_phi(y: Point2, x: Point2, params: KernelParams, quad: QuadratureConfig) -> IntegralResult:
    """
    Phi(y, x) = -1/(2 pi K(x2)) int_0^inf Im[K(y2 + i eta)/(y2 - x2 + i eta)] u du / eta.

    Returns the value with its quadrature error estimate; raises AccuracyError (carrying the best
    estimate) when the quadrature does not reach the configured tolerance.
    """
    integrand = _PhiIntegrand(y, x, params)
    geometry = integrand.geometry
    _check_pair(y, x, params, geometry.beta1)
    # the integrand varies on the scale of |y - x| near u = 0
    scale = min(max(math.sqrt(geometry.r2), 1e-9 * params.h), params.h)
    result = integrate_semi_infinite(integrand.direct, quad, scale=scale)
    factor = -1.0 / (2 * math.pi * anchor_value(x[1], params))
    phi = IntegralResult(
        factor * result.value, abs(factor) * result.error_estimate, result.evaluations, result.converged
    )
    if not result.converged:
        raise AccuracyError(
            f"Phi quadrature did not converge at y={tuple(y)}, x={tuple(x)}: "
            f"value={phi.value!r}, error estimate={phi.error_estimate!r}",
            result=phi,
        )
    return phi


def eval_grad_phi_y(
        y: Point2, x: Point2, params: KernelParams, quad: Optional[QuadratureConfig] = None
) -> Tuple[float, float]:
    """
    Gradient of Phi in y.

    With s = eta the integral reads int_|alpha|^inf Im F(y2 + i s) ds, F(w) = K(w)/(w - x2). Differentiating
    under the integral sign gives exact differentials in s, so both partials reduce to boundary values:
    dPhi/dy1 = sgn(y1 - x1) Im F(y2 + i|alpha|) / (2 pi K(x2)), dPhi/dy2 = -Re F(y2 + i|alpha|) / (2 pi K(x2)).
    No quadrature is involved; quad is accepted for interface symmetry with eval_phi.
    """
    geometry = kernel_geometry(y, x, params)
    _check_pair(y, x, params, geometry.beta1)
    alpha = math.sqrt(geometry.alpha2)
    w = complex(y[1], alpha)
    f = _kernel_value(w, x[1], params) / complex(geometry.beta, alpha)
    factor = 1.0 / (2 * math.pi * anchor_value(x[1], params))
    d1 = math.copysign(1.0, y[0] - x[0]) * f.imag * factor if y[0] != x[0] else 0.0
    return d1, -f.real * factor


def phi_upper_bound(y: Point2, x: Point2, params: KernelParams, C0: float) -> float:
    """C0 exp(-a cos(rho1 (y2 - h/2)) ch(rho1 alpha)) (1 + ln(1 + 15 h^2 / (alpha^2 + beta^2)))."""
    alpha2 = (y[0] - x[0]) ** 2
    r2 = alpha2 + (y[1] - x[1]) ** 2
    if r2 == 0:
        return math.inf
    t = params.rho1 * math.sqrt(alpha2)
    if t > _MAX_CH_ARGUMENT:
        return 0.0
    decay = math.exp(-params.a * params.decay_cosine(y[1]) * math.cosh(t))
    return C0 * decay * (1 + math.log1p(15 * params.h ** 2 / r2))


def bound_ratio(phi: float, y: Point2, x: Point2, params: KernelParams) -> float:
    """|Phi| exp(a cos(.) ch(rho1 alpha)) / (1 + ln(1 + 15 h^2 / r^2)), evaluated in log space."""
    if phi == 0:
        return 0.0
    alpha2 = (y[0] - x[0]) ** 2
    r2 = alpha2 + (y[1] - x[1]) ** 2
    exponent = params.a * params.decay_cosine(y[1]) * math.cosh(params.rho1 * math.sqrt(alpha2))
    return math.exp(math.log(abs(phi)) + exponent - math.log1p(math.log1p(15 * params.h ** 2 / r2)))
