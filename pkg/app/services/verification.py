import logging
import math
from typing import Callable, Dict, List, Optional, Sequence

import numpy as np
import pydantic

from app.kernel.certification import certify_phi_bound, fit_term_constants
from app.kernel.core import KernelParams, Point2
from app.kernel.functions import eval_phi, integrand_terms, phi_integrand_decomposed, phi_integrand_direct
from app.quadrature.core import QuadratureConfig, integrate_semi_infinite
from app.quadrature.truncation import reference_inner_integral
from app.services.errors import AccuracyError

logger = logging.getLogger(__name__)

EQUIVALENCE_TOLERANCE = 1e-10
INNER_INTEGRAL_TOLERANCE = 1e-8
HARMONICITY_WIDTHS = (1e-2, 5e-3, 2.5e-3)
HARMONICITY_ORDER_RANGE = (1.8, 2.4)
SINGULARITY_RADII = (1e-2, 1e-3, 1e-4)
BOUND_STABILITY_TOLERANCE = 0.01
SINGULARITY_SHRINK_FACTOR = 5.0


class SuiteResult(pydantic.BaseModel):
    suite: str
    passed: bool
    measurements: Dict[str, float] = {}
    detail: str = ""

    def rows(self):
        return [(self.suite, self.passed, metric, value) for metric, value in self.measurements.items()]


def _random_pair(rng: np.random.Generator, params: KernelParams, alpha_max: float = 3.0):
    h = params.h
    alpha = rng.uniform(-alpha_max, alpha_max)
    y2, x2 = rng.uniform(0.02 * h, 0.98 * h, size=2)
    return Point2(float(alpha), float(y2)), Point2(0.0, float(x2))


def suite_equivalence(params: KernelParams, quad: QuadratureConfig, samples: int = 1000, seed: int = 7) -> SuiteResult:
    """Direct complex form against the two-term decomposition, relative to the size of the two terms."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(samples):
        u = float(rng.uniform(0.0, 5.0))
        y, x = _random_pair(rng, params)
        first, second = integrand_terms(u, y, x, params)
        scale = abs(first) + abs(second)
        if scale == 0:
            continue
        deviation = abs(phi_integrand_direct(u, y, x, params) - phi_integrand_decomposed(u, y, x, params)) / scale
        worst = max(worst, deviation)
    return SuiteResult(
        suite="equivalence",
        passed=worst <= EQUIVALENCE_TOLERANCE,
        measurements={"max_relative_deviation": worst},
    )


def suite_inner_integral(params: KernelParams, quad: QuadratureConfig, samples: int = 100, seed: int = 11) -> SuiteResult:
    rng = np.random.default_rng(seed)
    h = params.h
    worst = 0.0
    for _ in range(samples):
        r2 = float(10 ** rng.uniform(-3, 1))
        r1sq = r2 + float(rng.uniform(3 * h * h, 15 * h * h))
        numeric = integrate_semi_infinite(
            lambda u: u / ((u * u + r2) * (u * u + r1sq)), quad, scale=math.sqrt(r2)
        ).value
        exact = reference_inner_integral(r2, r1sq)
        worst = max(worst, abs(numeric - exact) / exact)
    return SuiteResult(
        suite="inner_integral", passed=worst <= INNER_INTEGRAL_TOLERANCE, measurements={"max_relative_error": worst}
    )


def suite_bound_certification(params: KernelParams, quad: QuadratureConfig, pairs: int = 50, seed: int = 0) -> SuiteResult:
    """C0 fitted on alpha in [0, 5] must move by less than 1% when the grid is extended to [0, 10]."""
    short = certify_phi_bound(params, quad, alpha_max=5.0, pairs=pairs, seed=seed)
    extended = certify_phi_bound(params, quad, alpha_max=10.0, pairs=pairs, seed=seed)
    return SuiteResult(
        suite="bound_certification",
        passed=math.isfinite(extended.c0) and abs(extended.c0 - short.c0) < BOUND_STABILITY_TOLERANCE * short.c0,
        measurements={"c0": short.c0, "c0_extended": extended.c0},
        detail=f"argmax (alpha, y2, x2) = {short.argmax}",
    )


def _phi_best_effort(y, x, params, quad) -> float:
    try:
        return eval_phi(y, x, params, quad).value
    except AccuracyError as e:
        return e.result.value


def harmonicity_points(params: KernelParams) -> List[Point2]:
    h = params.h
    return [Point2(y1, f * h) for y1 in (-1.5, -0.75, 0.75, 1.5, 3.0) for f in (0.2, 0.4, 0.6, 0.8)]


def laplacian_norms(
        params: KernelParams, quad: QuadratureConfig, widths: Sequence[float] = HARMONICITY_WIDTHS
) -> List[float]:
    """Max over the harmonicity points of |5-point Laplacian of Phi(., x)|, x = (0, h/2), per stencil width."""
    x = Point2(0.0, params.h / 2)
    # the stencil divides by width^2, so Phi is needed close to machine precision
    sharp = quad.copy(update={"abs_tol": 1e-300, "rel_tol": 1e-14})

    def phi(p):
        return _phi_best_effort(p, x, params, sharp)

    norms = []
    for width in widths:
        worst = 0.0
        for y1, y2 in harmonicity_points(params):
            stencil = (
                phi(Point2(y1 + width, y2)) + phi(Point2(y1 - width, y2)) + phi(Point2(y1, y2 + width))
                + phi(Point2(y1, y2 - width)) - 4 * phi(Point2(y1, y2))
            ) / (width * width)
            worst = max(worst, abs(stencil))
        norms.append(worst)
    return norms


def suite_harmonicity(params: KernelParams, quad: QuadratureConfig) -> SuiteResult:
    norms = laplacian_norms(params, quad)
    orders = [math.log2(coarse / fine) for coarse, fine in zip(norms, norms[1:])]
    low, high = HARMONICITY_ORDER_RANGE
    measurements = {f"laplacian_{w:g}": n for w, n in zip(HARMONICITY_WIDTHS, norms)}
    measurements.update({f"order_{i + 1}": order for i, order in enumerate(orders)})
    return SuiteResult(
        suite="harmonicity", passed=all(low <= order <= high for order in orders), measurements=measurements
    )


def regular_part(params: KernelParams, quad: QuadratureConfig, radii: Sequence[float] = SINGULARITY_RADII) -> List[float]:
    """Phi(y, x) + ln|y - x| / (2 pi) along the diagonal direction out of x = (0, h/2)."""
    x = Point2(0.0, params.h / 2)
    values = []
    for r in radii:
        step = r / math.sqrt(2)
        y = Point2(x.y1 + step, x.y2 + step)
        values.append(eval_phi(y, x, params, quad).value + math.log(r) / (2 * math.pi))
    return values


def suite_singularity(params: KernelParams, quad: QuadratureConfig) -> SuiteResult:
    values = regular_part(params, quad)
    differences = [abs(b - a) for a, b in zip(values, values[1:])]
    passed = all(math.isfinite(v) for v in values) and all(
        later * SINGULARITY_SHRINK_FACTOR <= earlier for earlier, later in zip(differences, differences[1:])
    )
    measurements = {f"regular_part_{r:g}": v for r, v in zip(SINGULARITY_RADII, values)}
    measurements.update({f"difference_{i + 1}": d for i, d in enumerate(differences)})
    return SuiteResult(suite="singularity", passed=passed, measurements=measurements)


def suite_term_constants(params: KernelParams, quad: QuadratureConfig) -> SuiteResult:
    constants = fit_term_constants(params)
    return SuiteResult(
        suite="term_constants",
        passed=math.isfinite(constants.c1) and math.isfinite(constants.c2),
        measurements={"c1": constants.c1, "c2": constants.c2},
    )


SUITES: Dict[str, Callable[[KernelParams, QuadratureConfig], SuiteResult]] = {
    "equivalence": suite_equivalence,
    "inner_integral": suite_inner_integral,
    "bound_certification": suite_bound_certification,
    "harmonicity": suite_harmonicity,
    "singularity": suite_singularity,
    "term_constants": suite_term_constants,
}


def run_suites(
        params: KernelParams, quad: QuadratureConfig, names: Optional[Sequence[str]] = None
) -> List[SuiteResult]:
    results = []
    for name in names or SUITES:
        if name not in SUITES:
            raise KeyError(f"Unknown verification suite '{name}' (known: {', '.join(SUITES)})")
        logger.info(f"Running verification suite '{name}'...")
        result = SUITES[name](params, quad)
        log = logger.info if result.passed else logger.error
        log(f"Suite '{name}': {'PASS' if result.passed else 'FAIL'} {result.measurements} {result.detail}".rstrip())
        results.append(result)
    return results
