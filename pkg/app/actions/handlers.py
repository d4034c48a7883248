import logging
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Callable, Iterable, List, Optional, Sequence, TextIO

from app import settings
from app.actions.configurations import (
    DecayReportConfig,
    KernelEvalConfig,
    ReconstructConfig,
    RunConfig,
    VerifyConfig,
)
from app.domain.core import BandDomain, CurveKind
from app.kernel.core import KernelParams, Point2
from app.kernel.functions import eval_phi
from app.quadrature.core import QuadratureConfig
from app.representation.boundary_integrals import reconstruct
from app.representation.core import CauchyTrace, build_trace
from app.representation.growth import circle_sample_points, decay_ratio_report
from app.services.activity_logger import activity_logger, log_action_activity
from app.services.errors import (
    AccuracyError,
    ClassificationError,
    ConfigurationNotFound,
    KernelDomainError,
    SingularityError,
    VerificationFailed,
)
from app.services.utils import read_csv_table, write_csv
from app.services.verification import run_suites

logger = logging.getLogger(__name__)

KERNEL_EVAL_HEADER = ("y1", "y2", "x1", "x2", "phi", "error_estimate", "error_code")
RECONSTRUCT_HEADER = (
    "x1", "x2", "value", "I1", "I2", "truncation_Y", "quad_error", "classification", "certified",
    "error_code",
)
DECAY_REPORT_HEADER = ("R", "ratio")
VERIFY_HEADER = ("suite", "passed", "metric", "value")

# Row-level error codes written instead of aborting a batch
ERROR_SINGULAR = "singular"
ERROR_DOMAIN = "domain"
ERROR_ACCURACY = "accuracy"
ERROR_CLASSIFICATION = "classification"


def map_rows(func: Callable, items: Sequence) -> List:
    """Applies func to every item, on BATCH_WORKERS threads; results keep the input order."""
    if settings.BATCH_WORKERS <= 1 or len(items) <= 1:
        return [func(item) for item in items]
    with ThreadPoolExecutor(max_workers=settings.BATCH_WORKERS) as executor:
        return list(executor.map(func, items))


def _points_path(action_config, points: Optional[Path]) -> Path:
    path = points or action_config.points
    if path is None:
        raise ConfigurationNotFound("No points file given; use --points or set 'points' in the command block.")
    return Path(path)


def _kernel_row(params: KernelParams, quad: QuadratureConfig, row: Sequence[float]) -> tuple:
    y1, y2, x1, x2 = row
    try:
        phi = eval_phi(Point2(y1, y2), Point2(x1, x2), params, quad)
    except SingularityError:
        return y1, y2, x1, x2, None, None, ERROR_SINGULAR
    except AccuracyError as e:
        return y1, y2, x1, x2, e.result.value, e.result.error_estimate, ERROR_ACCURACY
    except KernelDomainError:
        return y1, y2, x1, x2, None, None, ERROR_DOMAIN
    return y1, y2, x1, x2, phi.value, phi.error_estimate, ""


@activity_logger()
def action_kernel_eval(
        run_config: RunConfig, action_config: KernelEvalConfig, output: TextIO, points: Optional[Path] = None
):
    params = run_config.kernel.to_params()
    quad = run_config.quadrature
    table = read_csv_table(_points_path(action_config, points), ("y1", "y2", "x1", "x2"))
    rows = map_rows(lambda row: _kernel_row(params, quad, [float(v) for v in row]), list(table))
    write_csv(output, KERNEL_EVAL_HEADER, rows)
    failed = sum(1 for row in rows if row[-1])
    if failed:
        log_action_activity(
            "kernel_eval", f"{failed} of {len(rows)} rows carry an error code.", level="WARNING",
            data={"failed_rows": failed},
        )
    return {"rows": len(rows), "failed_rows": failed}


@activity_logger()
def action_verify(run_config: RunConfig, action_config: VerifyConfig, output: TextIO, points: Optional[Path] = None):
    params = run_config.kernel.to_params()
    results = run_suites(params, run_config.quadrature, action_config.suites)
    write_csv(output, VERIFY_HEADER, (row for result in results for row in result.rows()))
    failed = [result.suite for result in results if not result.passed]
    if failed:
        raise VerificationFailed(failed)
    return {"suites": len(results), "passed": len(results)}


def _build_traces(action_config, domain: BandDomain):
    lower = build_trace(CurveKind.LOWER, action_config.lower_trace, domain, action_config.lower_growth_c)
    upper = build_trace(CurveKind.UPPER, action_config.upper_trace, domain, action_config.upper_growth_c)
    return lower, upper


def _reconstruct_row(
        x: Point2, domain: BandDomain, traces: Iterable[CauchyTrace], params: KernelParams, quad: QuadratureConfig
) -> tuple:
    try:
        report = reconstruct(x, domain, *traces, params, quad)
    except ClassificationError as e:
        classification = e.classification.value if e.classification is not None else None
        return x.y1, x.y2, None, None, None, None, None, classification, None, ERROR_CLASSIFICATION
    except KernelDomainError:
        return x.y1, x.y2, None, None, None, None, None, None, None, ERROR_DOMAIN
    return (
        x.y1, x.y2, report.value, report.I1, report.I2, report.truncation_Y, report.quad_error,
        report.classification.value, report.certified, "" if report.converged else ERROR_ACCURACY,
    )


@activity_logger()
def action_reconstruct(
        run_config: RunConfig, action_config: ReconstructConfig, output: TextIO, points: Optional[Path] = None
):
    params = run_config.kernel.to_params()
    domain = run_config.domain.build(params.h)
    traces = _build_traces(action_config, domain)
    table = read_csv_table(_points_path(action_config, points), ("x1", "x2"))
    xs = [Point2(float(x1), float(x2)) for x1, x2 in table]
    rows = map_rows(lambda x: _reconstruct_row(x, domain, traces, params, run_config.quadrature), xs)
    write_csv(output, RECONSTRUCT_HEADER, rows)
    return {"rows": len(rows), "failed_rows": sum(1 for row in rows if row[-1])}


@activity_logger()
def action_decay_report(
        run_config: RunConfig, action_config: DecayReportConfig, output: TextIO, points: Optional[Path] = None
):
    params = run_config.kernel.to_params()
    domain = run_config.domain.build(params.h)
    traces = _build_traces(action_config, domain)
    x2_samples = [fraction * params.h for fraction in action_config.x2_fractions]
    xs = circle_sample_points(domain, action_config.radii, x2_samples)
    rows = map_rows(lambda x: _reconstruct_row(x, domain, traces, params, run_config.quadrature), xs)
    values = []
    for x, row in zip(xs, rows):
        if row[2] is None:
            logger.warning(f"Skipping x={tuple(x)} in the decay report ({row[-1]}).")
            continue
        if row[-1]:
            logger.warning(f"Using x={tuple(x)} in the decay report despite error code {row[-1]}.")
        values.append((x, row[2]))
    report = decay_ratio_report(values, params, radii=action_config.radii)
    write_csv(output, DECAY_REPORT_HEADER, report)
    return {"radii": len(report), "points": len(values)}
