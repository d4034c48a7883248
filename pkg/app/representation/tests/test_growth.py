import math

import pytest

from app.domain.core import CurveKind, PointClass, classify_point
from app.kernel.core import Point2
from app.representation.boundary_integrals import reconstruct
from app.representation.core import build_trace, zero_trace
from app.representation.growth import (
    circle_sample_points,
    decay_ratio_report,
    fit_growth_envelope,
    growth_certificate,
)
from app.services.errors import ConfigurationValidationError

X1_SAMPLES = [0.0, 1.0, 2.0, 3.0, 4.0, 5.0, 6.0]


def test_envelope_of_exact_exponential():
    xs = [0.0, 1.0, 2.0, 3.0]
    c_hat, C = fit_growth_envelope(xs, [2 * math.exp(0.3 * x) for x in xs])

    assert c_hat == pytest.approx(0.3)
    assert C == pytest.approx(2.0)


def test_envelope_dominates_every_sample():
    xs = [0.0, 1.0, 2.0, 3.0, 4.0]
    integrals = [1.0, -3.0, 2.0, 10.0, 5.0]

    c_hat, C = fit_growth_envelope(xs, integrals)

    assert all(abs(i) <= C * math.exp(c_hat * x) * (1 + 1e-12) for x, i in zip(xs, integrals))


def test_envelope_of_decaying_samples_has_zero_rate():
    xs = [0.0, 1.0, 2.0]

    assert fit_growth_envelope(xs, [1.0, 0.5, 0.25]) == (0.0, 1.0)


def test_envelope_of_zero_samples():
    assert fit_growth_envelope([0.0, 1.0, 2.0], [0.0, 0.0, 0.0]) == (0.0, 0.0)


def test_zero_trace_certificate(strip, params, quad):
    certificate = growth_certificate(zero_trace(CurveKind.LOWER), strip, params, quad, X1_SAMPLES)

    assert certificate.integrals == [0.0] * len(X1_SAMPLES)
    assert certificate.c_hat == 0.0
    assert certificate.passed


def test_certificate_needs_enough_samples(strip, params, quad):
    with pytest.raises(ConfigurationValidationError):
        growth_certificate(zero_trace(CurveKind.LOWER), strip, params, quad, [0.0, 1.0, 2.0])


@pytest.mark.slow
@pytest.mark.parametrize("c", [0.0, 0.1, 0.3, 0.45])
def test_growth_transfers_to_the_boundary_integrals(strip, params, quad, c):
    trace = build_trace(CurveKind.LOWER, f"exp_growth:c={c}", strip)

    certificate = growth_certificate(trace, strip, params, quad, X1_SAMPLES)

    assert certificate.passed
    assert certificate.c_hat <= c + 0.05


@pytest.mark.slow
def test_bounded_data_gives_bounded_integrals(strip, params, quad):
    trace = build_trace(CurveKind.UPPER, "exp_growth:c=0,M=1", strip)

    certificate = growth_certificate(trace, strip, params, quad, X1_SAMPLES)

    spread = max(abs(i) for i in certificate.integrals) / min(abs(i) for i in certificate.integrals)
    assert spread == pytest.approx(1.0, rel=1e-6)


def test_decay_ratios_of_zero_function(params):
    values = [(Point2(2.0, 0.0), 0.0), (Point2(0.0, 2.0), 0.0), (Point2(4.0, 0.0), 0.0)]

    assert decay_ratio_report(values, params) == [(2.0, 0.0), (4.0, 0.0)]


def test_decay_ratio_at_the_critical_growth(params):
    radii = [1.0, 2.0, 3.0]
    values = [(Point2(r, 0.0), math.exp(math.pi * r / (2 * params.h))) for r in radii]

    ratios = decay_ratio_report(values, params)

    assert [r for r, _ in ratios] == radii
    assert all(ratio == pytest.approx(1.0) for _, ratio in ratios)


def test_decay_ratio_takes_the_max_on_each_circle(params):
    values = [(Point2(0.6, 0.8), -3.0), (Point2(-0.6, 0.8), 1.0)]

    assert decay_ratio_report(values, params) == [(1.0, pytest.approx(3.0 / math.exp(math.pi / (2 * params.h))))]


def test_decay_ratio_notes_missing_radii(params, caplog):
    caplog.set_level("INFO")

    decay_ratio_report([(Point2(1.0, 0.0), 1.0)], params, radii=[1.0, 5.0])

    assert "|x| = 5.0" in caplog.text


def test_circle_points_stay_inside(strip, params):
    points = circle_sample_points(strip, [2.0, 4.0], [1.0, 2.0, 5.0])

    # x2 >= R has no point on the circle
    assert len(points) == 6
    for x in points:
        assert classify_point(strip, x) == PointClass.INSIDE
        assert round(math.hypot(*x), 9) in (2.0, 4.0)


@pytest.mark.slow
def test_reconstructed_growth_decays_against_the_critical_rate(strip, params, quad):
    traces = (
        build_trace(CurveKind.LOWER, "exp_growth:c=0.3", strip),
        build_trace(CurveKind.UPPER, "exp_growth:c=0.3", strip),
    )
    radii = [2.0, 4.0, 6.0, 8.0]
    x2_samples = [params.h / 3, params.h / 2, 2 * params.h / 3]
    values = [
        (x, reconstruct(x, strip, *traces, params, quad).value)
        for x in circle_sample_points(strip, radii, x2_samples)
    ]

    ratios = [ratio for _, ratio in decay_ratio_report(values, params, radii=radii)]

    assert len(ratios) == 4
    assert all(later < earlier for earlier, later in zip(ratios, ratios[1:]))
