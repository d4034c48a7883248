import logging
import math
from collections import defaultdict
from typing import Iterable, List, Optional, Sequence, Tuple

from app import settings
from app.domain.core import BandDomain, PointClass, classify_point
from app.kernel.core import KernelParams, Point2
from app.quadrature.core import QuadratureConfig
from app.services.errors import ConfigurationValidationError
from .boundary_integrals import curve_integral, required_truncation
from .core import CauchyTrace, GrowthCertificate

__all__ = ["growth_certificate", "fit_growth_envelope", "decay_ratio_report", "circle_sample_points"]

logger = logging.getLogger(__name__)

MIN_GROWTH_SAMPLES = 4


def fit_growth_envelope(x1_samples: Sequence[float], integrals: Sequence[float]) -> Tuple[float, float]:
    """
    Smallest c_hat >= 0 for which the envelope through the first non-zero sample, C exp(c_hat x1),
    dominates every later sample. All-zero integrals give (0, 0).
    """
    pairs = sorted(zip(x1_samples, integrals))
    anchor = next(((x, abs(i)) for x, i in pairs if i != 0), None)
    if anchor is None:
        return 0.0, 0.0
    x0, i0 = anchor
    c_hat = 0.0
    for x, i in pairs:
        if x > x0 and i != 0:
            c_hat = max(c_hat, (math.log(abs(i)) - math.log(i0)) / (x - x0))
    return c_hat, i0 * math.exp(-c_hat * x0)


def growth_certificate(
        trace: CauchyTrace, domain: BandDomain, params: KernelParams, quad: QuadratureConfig,
        x1_samples: Sequence[float], tolerance: float = None
) -> GrowthCertificate:
    """
    Evaluates I_j(x1, h/2) along the samples and fits |I_j| <= C exp(c_hat x1); passes when c_hat does
    not exceed the trace's declared growth rate by more than the fit tolerance.
    """
    tolerance = settings.GROWTH_FIT_TOLERANCE if tolerance is None else tolerance
    x1_samples = [float(x1) for x1 in x1_samples]
    if len(x1_samples) < MIN_GROWTH_SAMPLES:
        raise ConfigurationValidationError(
            f"Growth certificate needs at least {MIN_GROWTH_SAMPLES} x1 samples, got {len(x1_samples)}"
        )
    if trace.growth_rate_c >= params.rho / 2:
        logger.warning(f"Declared growth c={trace.growth_rate_c} is not below rho/2={params.rho / 2}.")
    integrals = []
    for x1 in x1_samples:
        x = Point2(x1, params.h / 2)
        Y = required_truncation(x, domain, params, quad, trace.growth_rate_c)
        integrals.append(curve_integral(x, domain, trace, params, quad, Y).value)
    c_hat, C = fit_growth_envelope(x1_samples, integrals)
    passed = c_hat <= trace.growth_rate_c + tolerance
    logger.info(
        f"Growth certificate on {trace.curve.value}: c_hat={c_hat:.4g}, declared c={trace.growth_rate_c}, "
        f"passed={passed}"
    )
    return GrowthCertificate(
        curve=trace.curve,
        declared_c=trace.growth_rate_c,
        c_hat=c_hat,
        C=C,
        tolerance=tolerance,
        x1_samples=x1_samples,
        integrals=integrals,
        passed=passed,
    )


def decay_ratio_report(
        values: Iterable[Tuple[Point2, float]], params: KernelParams, radii: Optional[Sequence[float]] = None
) -> List[Tuple[float, float]]:
    """
    Per radius R = |x| (rounded to 9 decimals): max |U| / exp(pi R / (2h)), sorted by R.
    Radii requested explicitly but absent from the values are skipped with a note.
    """
    groups = defaultdict(list)
    for x, u in values:
        groups[round(math.hypot(x[0], x[1]), 9)].append(abs(u))
    if radii is not None:
        for radius in radii:
            if round(radius, 9) not in groups:
                logger.info(f"No sample points on |x| = {radius}; radius skipped.")
    return [
        (radius, max(groups[radius]) / math.exp(math.pi * radius / (2 * params.h)))
        for radius in sorted(groups)
    ]


def circle_sample_points(domain: BandDomain, radii: Sequence[float], x2_samples: Sequence[float]) -> List[Point2]:
    """Points (+-sqrt(R^2 - x2^2), x2) of |x| = R that lie strictly inside the domain."""
    points = []
    for radius in radii:
        for x2 in x2_samples:
            if abs(x2) >= radius:
                continue
            x1 = math.sqrt(radius * radius - x2 * x2)
            for point in (Point2(-x1, x2), Point2(x1, x2)):
                if classify_point(domain, point) == PointClass.INSIDE:
                    points.append(point)
    return points
