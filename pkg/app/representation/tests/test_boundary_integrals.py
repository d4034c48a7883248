import math

import pytest

from app.analytic.core import eval_grad_U, eval_U, harmonic_from_id
from app.domain.core import CurveKind, PointClass, classify_point
from app.domain.curves import straight_strip
from app.kernel.core import KernelParams, Point2
from app.quadrature.core import QuadratureConfig
from app.representation.boundary_integrals import (
    CurveIntegral,
    curve_integral,
    green_identity_value,
    reconstruct,
    required_truncation,
)
from app.representation.core import build_trace, zero_trace
from app.services.errors import ClassificationError, CoverageError, KernelDomainError

STRIP_MODE = "analytic:strip_mode:n=1,A=1,B=0"
STRIP_OUTSIDE = [
    Point2(0.0, -1.0), Point2(2.0, -0.5), Point2(-1.0, math.pi + 0.8), Point2(-3.0, -0.2), Point2(4.0, -1.1),
    Point2(0.5, math.pi + 0.3), Point2(-2.0, math.pi + 1.1), Point2(3.0, math.pi + 0.2), Point2(1.0, -0.1),
    Point2(-4.0, math.pi + 0.5),
]
CURVED_INSIDE = [
    Point2(0.3, 1.1), Point2(-1.0, 1.5), Point2(1.5, 2.5), Point2(0.0, 0.6), Point2(-2.0, 2.0),
    Point2(2.5, 1.2), Point2(-3.0, 0.9), Point2(0.8, 2.7), Point2(-0.5, 0.4), Point2(3.0, 1.8),
]
CURVED_OUTSIDE = [
    Point2(0.0, -1.0), Point2(2.0, -0.5), Point2(-1.0, math.pi + 0.8), Point2(-3.0, -0.3), Point2(4.0, -1.1),
    Point2(0.5, math.pi + 0.4), Point2(-2.0, math.pi + 1.1), Point2(3.0, math.pi + 0.3), Point2(1.0, -0.2),
    Point2(-4.0, math.pi + 0.6),
]


@pytest.fixture
def strip_mode_traces(strip):
    return build_trace(CurveKind.LOWER, STRIP_MODE, strip), build_trace(CurveKind.UPPER, STRIP_MODE, strip)


def test_zero_traces_reconstruct_zero(strip, params, quad):
    report = reconstruct(
        Point2(0.0, 1.0), strip, zero_trace(CurveKind.LOWER), zero_trace(CurveKind.UPPER), params, quad
    )

    assert report.value == 0.0
    assert report.I1 == report.I2 == 0.0
    assert report.quad_error == 0.0
    assert report.classification == PointClass.INSIDE
    assert report.certified
    assert report.truncation_Y > 0


@pytest.mark.parametrize("x", [Point2(0.0, -1.0), Point2(0.0, 4.0)])
def test_reconstruction_outside_is_refused(strip, params, quad, x):
    with pytest.raises(ClassificationError) as exc_info:
        reconstruct(x, strip, zero_trace(CurveKind.LOWER), zero_trace(CurveKind.UPPER), params, quad)

    assert exc_info.value.classification == PointClass.OUTSIDE


def test_reconstruction_near_the_boundary_is_refused(strip, params, quad):
    with pytest.raises(ClassificationError) as exc_info:
        reconstruct(Point2(0.0, 1e-5), strip, zero_trace(CurveKind.LOWER), zero_trace(CurveKind.UPPER), params, quad)

    assert exc_info.value.classification == PointClass.NEAR_BOUNDARY


def test_traces_must_match_their_curves(strip, params, quad):
    with pytest.raises(ClassificationError):
        reconstruct(Point2(0.0, 1.0), strip, zero_trace(CurveKind.UPPER), zero_trace(CurveKind.LOWER), params, quad)


def test_domain_must_share_the_kernel_band(params, quad):
    other = straight_strip(params.h / 2)

    with pytest.raises(KernelDomainError):
        required_truncation(Point2(0.0, 0.5), other, params, quad, c=0.0)


def test_truncation_grows_with_the_data_rate(strip, params, quad):
    x = Point2(1.0, 1.0)

    assert required_truncation(x, strip, params, quad, 0.0) < required_truncation(x, strip, params, quad, 0.4)


def test_uncovered_table_trace_raises(tmp_path, strip, params, quad):
    path = tmp_path / "trace.csv"
    path.write_text("y1,value\n-1,1.0\n1,1.0\n")
    trace = build_trace(CurveKind.LOWER, f"table:path={path}", strip, growth_rate_c=0.0)
    x = Point2(0.0, 1.0)
    Y = required_truncation(x, strip, params, quad, 0.0)

    with pytest.raises(CoverageError) as exc_info:
        curve_integral(x, strip, trace, params, quad, Y)

    assert exc_info.value.required_y == Y


def test_curve_integral_of_bounded_data_is_bounded(strip, params, quad):
    trace = build_trace(CurveKind.LOWER, "exp_growth:c=0", strip)
    values = []
    for x1 in (0.0, 3.0):
        x = Point2(x1, params.h / 2)
        values.append(curve_integral(x, strip, trace, params, quad, required_truncation(x, strip, params, quad, 0.0)))

    # translation invariance of the strip: constant data gives the same integral at every x1
    assert values[0].value == pytest.approx(values[1].value, rel=1e-6)
    assert all(v.converged for v in values)


@pytest.mark.slow
@pytest.mark.parametrize("x", [Point2(0.0, math.pi / 2), Point2(1.0, math.pi / 4), Point2(-2.0, 2.0)])
def test_strip_mode_reconstruction(strip, params, quad, strip_mode_traces, strip_mode_exact, x):
    report = reconstruct(x, strip, *strip_mode_traces, params, quad)
    exact = strip_mode_exact(x)

    assert report.converged
    assert abs(report.value - exact) <= 1e-3 * abs(exact)
    assert abs(report.value - exact) <= report.quad_error + 1e-6 * abs(exact)


@pytest.mark.slow
def test_strip_mode_reconstruction_values(strip, params, quad, strip_mode_traces):
    assert reconstruct(Point2(0.0, math.pi / 2), strip, *strip_mode_traces, params, quad).value == pytest.approx(
        1.0, rel=1e-3
    )
    assert reconstruct(Point2(1.0, math.pi / 4), strip, *strip_mode_traces, params, quad).value == pytest.approx(
        1.92211, rel=1e-3
    )


@pytest.mark.slow
def test_tighter_tolerance_does_not_lose_accuracy(strip, params, strip_mode_traces, strip_mode_exact):
    x = Point2(1.0, math.pi / 4)
    exact = strip_mode_exact(x)
    loose = QuadratureConfig(abs_tol=1e-8, rel_tol=1e-6)
    tight = loose.copy(update={"rel_tol": 1e-7})

    loose_report = reconstruct(x, strip, *strip_mode_traces, params, loose)
    tight_report = reconstruct(x, strip, *strip_mode_traces, params, tight)

    loose_error = abs(loose_report.value - exact)
    tight_error = abs(tight_report.value - exact)
    assert loose_error <= 1e-3 * abs(exact)
    assert tight_error <= max(loose_error / 2, tight_report.quad_error + 1e-9 * abs(exact))


@pytest.mark.slow
def test_green_identity_reproduces_strip_mode_reconstruction(strip, params, quad, strip_mode_traces):
    x = Point2(0.5, 1.0)
    fn = harmonic_from_id("strip_mode:n=1,A=1,B=0")

    green = green_identity_value(x, strip, fn, params, quad)
    report = reconstruct(x, strip, *strip_mode_traces, params, quad)

    # U vanishes on the strip edges, so only the Phi dU/dn term is left
    assert green.value == pytest.approx(report.value, rel=1e-6)


def _data_scale(fn, domain, x1):
    # |U| + |grad U| on both curves over [x1 - 8, x1 + 8]
    points = [
        Point2(t, curve.f(t))
        for curve in (domain.gamma1, domain.gamma2)
        for t in (x1 - 8.0 + 0.5 * i for i in range(33))
    ]
    return max(abs(eval_U(fn, y)) + math.hypot(*eval_grad_U(fn, y)) for y in points)


@pytest.mark.slow
@pytest.mark.parametrize("x", STRIP_OUTSIDE)
def test_green_identity_vanishes_outside(strip, params, quad, x):
    fn = harmonic_from_id("re_exp:lambda=0.3")
    assert classify_point(strip, x) == PointClass.OUTSIDE

    result = green_identity_value(x, strip, fn, params, quad)

    assert abs(result.value) <= 1e-6 * _data_scale(fn, strip, x.y1)


@pytest.mark.slow
@pytest.mark.parametrize("x", CURVED_INSIDE)
def test_green_identity_on_curved_domain(curved_domain, params, quad, x):
    fn = harmonic_from_id("re_exp:lambda=0.4")
    assert classify_point(curved_domain, x) == PointClass.INSIDE

    result = green_identity_value(x, curved_domain, fn, params, quad)

    assert result.value == pytest.approx(eval_U(fn, x), rel=1e-6)


@pytest.mark.slow
@pytest.mark.parametrize("x", CURVED_OUTSIDE)
def test_green_identity_vanishes_outside_curved_domain(curved_domain, params, quad, x):
    fn = harmonic_from_id("re_exp:lambda=0.4")
    assert classify_point(curved_domain, x) == PointClass.OUTSIDE

    result = green_identity_value(x, curved_domain, fn, params, quad)

    assert abs(result.value) <= 1e-6 * _data_scale(fn, curved_domain, x.y1)


@pytest.mark.slow
def test_doubling_the_truncation_stays_within_the_error_estimate(strip, params, quad):
    lower = build_trace(CurveKind.LOWER, "exp_growth:c=0.3,M=1", strip)
    upper = zero_trace(CurveKind.UPPER)
    x = Point2(0.5, 1.0)

    report = reconstruct(x, strip, lower, upper, params, quad)
    doubled = reconstruct(x, strip, lower, upper, params, quad, truncation_Y=2 * report.truncation_Y)

    assert report.certified and report.converged
    assert doubled.truncation_Y == 2 * report.truncation_Y
    assert abs(doubled.value - report.value) <= report.quad_error


def test_fast_growing_data_is_not_certified(mocker, strip, params, quad):
    mocker.patch(
        "app.representation.boundary_integrals.curve_integral", return_value=CurveIntegral(0.0, 0.0, 0, True)
    )
    lower = build_trace(CurveKind.LOWER, "exp_growth:c=0.6,M=1", strip)

    report = reconstruct(Point2(0.0, 1.0), strip, lower, zero_trace(CurveKind.UPPER), params, quad)

    assert report.certified is False


def test_explicit_truncation_must_be_positive(strip, params, quad):
    with pytest.raises(KernelDomainError):
        reconstruct(
            Point2(0.0, 1.0), strip, zero_trace(CurveKind.LOWER), zero_trace(CurveKind.UPPER), params, quad,
            truncation_Y=0.0,
        )


def test_green_identity_rejects_mismatched_band(quad):
    params = KernelParams(rho=1.0, a=3.0, rho1=0.5)
    other = straight_strip(2.0)

    with pytest.raises(KernelDomainError):
        green_identity_value(Point2(0.0, 1.0), other, harmonic_from_id("zero"), params, quad)
