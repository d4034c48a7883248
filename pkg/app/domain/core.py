import logging
import math
from enum import Enum
from typing import Callable, Tuple

import numpy as np
import pydantic

from app import settings
from app.kernel.core import KernelParams, Point2
from app.services.errors import CurveDefinitionError, KernelDomainError

__all__ = [
    "CurveKind",
    "PointClass",
    "BoundaryCurve",
    "BandDomain",
    "sample_grid",
    "boundary_point",
    "exterior_normal",
    "arc_element",
    "classify_point",
    "kernel_decay_rate",
]

logger = logging.getLogger(__name__)

# Slack for comparing sampled values against declared bounds.
_BOUND_SLACK = 1e-12


class CurveKind(str, Enum):
    LOWER = "lower"  # gamma1
    UPPER = "upper"  # gamma2


class PointClass(str, Enum):
    INSIDE = "inside"
    OUTSIDE = "outside"
    NEAR_BOUNDARY = "near_boundary"


def sample_grid() -> np.ndarray:
    span = settings.DOMAIN_SAMPLE_SPAN
    return np.linspace(-span, span, settings.DOMAIN_SAMPLE_COUNT)


class BoundaryCurve(pydantic.BaseModel):
    """Graph y2 = f(y1) with bounded f and f' (|f| <= sup_abs_f, |f'| <= sup_abs_f_prime)."""
    kind: CurveKind
    family_id: str
    f: Callable[[float], float]
    f_prime: Callable[[float], float]
    sup_abs_f: float = pydantic.Field(..., ge=0)
    sup_abs_f_prime: float = pydantic.Field(..., ge=0)

    class Config:
        frozen = True
        arbitrary_types_allowed = True

    @pydantic.root_validator(skip_on_failure=True)
    def check_bounds(cls, values):
        f, f_prime = values["f"], values["f_prime"]
        for t in sample_grid():
            value, slope = f(float(t)), f_prime(float(t))
            if not (math.isfinite(value) and math.isfinite(slope)):
                raise ValueError(f"{values['family_id']}: non-finite value or slope at y1={t}")
            if abs(value) > values["sup_abs_f"] + _BOUND_SLACK:
                raise ValueError(f"{values['family_id']}: |f({t})|={abs(value)} exceeds sup_abs_f={values['sup_abs_f']}")
            if abs(slope) > values["sup_abs_f_prime"] + _BOUND_SLACK:
                raise ValueError(
                    f"{values['family_id']}: |f'({t})|={abs(slope)} exceeds sup_abs_f_prime={values['sup_abs_f_prime']}"
                )
        return values


class BandDomain(pydantic.BaseModel):
    """
    Domain between the graphs gamma1 (lower) and gamma2 (upper).

    f1 < f2 is enforced on the sample grid. Curves leaving the closed band [0, h] are accepted and
    recorded in within_band; the kernel only needs cos(rho1 (f - h/2)) > 0 along them.
    """
    gamma1: BoundaryCurve
    gamma2: BoundaryCurve
    h: float = pydantic.Field(..., gt=0)
    within_band: bool = True

    class Config:
        frozen = True

    @pydantic.root_validator(skip_on_failure=True)
    def check_curves(cls, values):
        gamma1, gamma2, h = values["gamma1"], values["gamma2"], values["h"]
        if gamma1.kind != CurveKind.LOWER or gamma2.kind != CurveKind.UPPER:
            raise ValueError("gamma1 must be the lower curve and gamma2 the upper curve")
        within_band = True
        for t in sample_grid():
            low, high = gamma1.f(float(t)), gamma2.f(float(t))
            if not low < high:
                raise ValueError(f"Curves touch or cross at y1={t}: f1={low}, f2={high}")
            if low < -_BOUND_SLACK or high > h + _BOUND_SLACK:
                within_band = False
        if not within_band:
            logger.warning(
                f"Domain ({gamma1.family_id}, {gamma2.family_id}) leaves the band [0, {h}]; "
                f"kernel admissibility is checked along the curves instead."
            )
        values["within_band"] = within_band
        return values

    def curve(self, kind: CurveKind) -> BoundaryCurve:
        return self.gamma1 if CurveKind(kind) == CurveKind.LOWER else self.gamma2

    @property
    def slope_bound(self) -> float:
        return max(self.gamma1.sup_abs_f_prime, self.gamma2.sup_abs_f_prime)


def boundary_point(domain: BandDomain, curve: CurveKind, y1: float) -> Point2:
    return Point2(y1, domain.curve(curve).f(y1))


def exterior_normal(domain: BandDomain, curve: CurveKind, y1: float) -> Tuple[float, float]:
    slope = domain.curve(curve).f_prime(y1)
    norm = math.hypot(1.0, slope)
    if CurveKind(curve) == CurveKind.LOWER:
        return slope / norm, -1.0 / norm
    return -slope / norm, 1.0 / norm


def arc_element(domain: BandDomain, curve: CurveKind, y1: float) -> float:
    return math.hypot(1.0, domain.curve(curve).f_prime(y1))


def classify_point(domain: BandDomain, x: Point2, near_tol: float = None) -> PointClass:
    """Vertical distance to the nearer curve, scaled by the slope bound, decides near_boundary."""
    near_tol = settings.NEAR_BOUNDARY_TOL if near_tol is None else near_tol
    if not near_tol > 0:
        raise CurveDefinitionError(f"near_tol must be positive, got {near_tol!r}")
    x1, x2 = x
    low, high = domain.gamma1.f(x1), domain.gamma2.f(x1)
    distance = min(abs(x2 - low), abs(high - x2)) / math.hypot(1.0, domain.slope_bound)
    if distance <= near_tol:
        return PointClass.NEAR_BOUNDARY
    if low < x2 < high:
        return PointClass.INSIDE
    return PointClass.OUTSIDE


def kernel_decay_rate(domain: BandDomain, params: KernelParams) -> float:
    """a * min cos(rho1 (f - h/2)) over sampled points of both curves; equals a1 for the straight strip."""
    lowest = min(
        params.decay_cosine(curve.f(float(t)))
        for curve in (domain.gamma1, domain.gamma2)
        for t in sample_grid()
    )
    if not lowest > 0:
        raise KernelDomainError(
            f"Kernel does not decay along the boundary (min cos(rho1 (f - h/2)) = {lowest}); "
            f"reduce rho1 or keep the curves closer to the band."
        )
    return params.a * lowest
