import logging
from enum import Enum
from typing import Callable, NamedTuple, Optional, Sequence

import pydantic
from scipy import integrate

from app import settings

__all__ = [
    "CutoffPolicy",
    "QuadratureConfig",
    "IntegralResult",
    "integrate_semi_infinite",
    "integrate_finite",
]

logger = logging.getLogger(__name__)


class CutoffPolicy(str, Enum):
    DECAY_DRIVEN = "decay_driven"
    FIXED = "fixed"


class QuadratureConfig(pydantic.BaseModel):
    abs_tol: float = pydantic.Field(settings.QUAD_ABS_TOL, gt=0)
    rel_tol: float = pydantic.Field(settings.QUAD_REL_TOL, gt=0)
    max_subdivisions: int = pydantic.Field(settings.QUAD_MAX_SUBDIVISIONS, gt=0)
    cutoff_policy: CutoffPolicy = CutoffPolicy.DECAY_DRIVEN
    u_max: Optional[float] = pydantic.Field(None, gt=0)

    class Config:
        frozen = True

    @pydantic.root_validator(skip_on_failure=True)
    def check_cutoff(cls, values):
        if values["cutoff_policy"] == CutoffPolicy.FIXED and values.get("u_max") is None:
            raise ValueError("u_max is required when cutoff_policy is 'fixed'")
        return values

    def tolerance_for(self, value: float) -> float:
        return max(self.abs_tol, self.rel_tol * abs(value))

    def with_tolerance(self, tol: float) -> "QuadratureConfig":
        """Copy with rel_tol set to tol and abs_tol no looser than tol."""
        return QuadratureConfig(
            abs_tol=min(self.abs_tol, tol),
            rel_tol=tol,
            max_subdivisions=self.max_subdivisions,
            cutoff_policy=self.cutoff_policy,
            u_max=self.u_max,
        )


class IntegralResult(NamedTuple):
    value: float
    error_estimate: float
    evaluations: int
    converged: bool


def _quadpack(f, a, b, epsabs, epsrel, limit, points=None):
    # With full_output, a fourth element (the warning message) is present only when QUADPACK flags a problem.
    output = integrate.quad(
        f, a, b, epsabs=epsabs, epsrel=epsrel, limit=limit, points=points, full_output=1
    )
    value, error, info = output[:3]
    return value, error, info["neval"], len(output) == 3


def integrate_semi_infinite(
        f: Callable[[float], float], quad: QuadratureConfig, scale: float = 1.0
) -> IntegralResult:
    """
    Integrate f over [0, inf) by geometric segmentation [0, s], [s, 2s], [2s, 4s], ...

    Each segment is an adaptive Gauss-Kronrod (QUADPACK) integral. With the decay-driven policy the
    segmentation stops after two consecutive segments contributing less than a quarter of the target
    tolerance (and never before [0, 4s] is covered); the last segment's magnitude is added to the error
    estimate as a proxy for the neglected tail. With the fixed policy the integral stops at quad.u_max.
    """
    if not scale > 0:
        raise ValueError(f"Segmentation scale must be positive, got {scale!r}")
    fixed = quad.cutoff_policy == CutoffPolicy.FIXED
    total, error, evaluations, converged = 0.0, 0.0, 0, True
    quiet_segments, last_value = 0, 0.0
    left, right = 0.0, scale
    for _ in range(settings.QUAD_MAX_SEGMENTS):
        if fixed:
            right = min(right, quad.u_max)
        value, segment_error, neval, ok = _quadpack(
            f, left, right, quad.abs_tol / 8, quad.rel_tol, quad.max_subdivisions
        )
        total += value
        error += segment_error
        evaluations += neval
        converged = converged and ok
        last_value = value
        if fixed:
            if right >= quad.u_max:
                break
        else:
            if abs(value) + segment_error < quad.tolerance_for(total) / 4:
                quiet_segments += 1
            else:
                quiet_segments = 0
            if quiet_segments >= 2 and right >= 4 * scale:
                break
        left, right = right, 2 * right
    else:
        logger.warning(f"Semi-infinite quadrature exhausted {settings.QUAD_MAX_SEGMENTS} segments (reached u={right}).")
        converged = False

    if not fixed:
        error += abs(last_value)
    converged = converged and error <= quad.tolerance_for(total)
    if not converged:
        logger.debug(f"Semi-infinite quadrature not converged: value={total!r}, error={error!r}")
    return IntegralResult(total, error, evaluations, converged)


def integrate_finite(
        f: Callable[[float], float], a: float, b: float, quad: QuadratureConfig, points: Sequence[float] = ()
) -> IntegralResult:
    """Adaptive QUADPACK integral over [a, b]; interior breakpoints concentrate refinement."""
    if b == a:
        return IntegralResult(0.0, 0.0, 0, True)
    interior = sorted({p for p in points if min(a, b) < p < max(a, b)})
    value, error, evaluations, ok = _quadpack(
        f, a, b, quad.abs_tol, quad.rel_tol, quad.max_subdivisions, interior or None
    )
    converged = ok and error <= quad.tolerance_for(value)
    return IntegralResult(value, error, evaluations, converged)
