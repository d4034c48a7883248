import math

import pytest

from app.domain.core import CurveKind
from app.domain.curves import build_curve, build_domain, straight_strip
from app.services.errors import CurveDefinitionError, DataFormatError


def test_flat_curve_accepts_band_tokens(params):
    curve = build_curve(CurveKind.UPPER, "flat:c0=h/2", params.h)

    assert curve.f(12.0) == pytest.approx(params.h / 2)
    assert curve.f_prime(12.0) == 0.0
    assert curve.sup_abs_f == pytest.approx(params.h / 2)


def test_sinusoidal_defaults(params):
    curve = build_curve(CurveKind.LOWER, "sinusoidal:c0=0.2,c1=0.1", params.h)

    assert curve.f(math.pi / 2) == pytest.approx(0.3)
    assert curve.f_prime(0.0) == pytest.approx(0.1)
    assert curve.sup_abs_f_prime == pytest.approx(0.1)


def test_bump_curve(params):
    curve = build_curve(CurveKind.LOWER, "bump:c0=0,height=0.3,center=1,width=0.5", params.h)

    assert curve.f(1.0) == pytest.approx(0.3)
    assert curve.f(40.0) == pytest.approx(0.0, abs=1e-300)
    assert curve.f_prime(1.0) == 0.0
    # the slope bound is attained at center +- width / sqrt(2)
    assert abs(curve.f_prime(1.0 + 0.5 / math.sqrt(2))) == pytest.approx(curve.sup_abs_f_prime)


@pytest.mark.parametrize(
    "family_id",
    [
        "wave:c0=0",
        "flat",
        "flat:c0=0,c9=1",
        "flat:c0=abc",
        "flat:c0",
        "bump:c0=0,height=1,width=0",
        "table:path=a.csv,extra=1",
        ":c0=1",
    ],
)
def test_invalid_identifiers(params, family_id):
    with pytest.raises(CurveDefinitionError):
        build_curve(CurveKind.LOWER, family_id, params.h)


def test_table_curve_interpolates_and_extends(tmp_path, params):
    path = tmp_path / "lower.csv"
    path.write_text("y1,f\n-2,0.0\n0,0.2\n2,0.1\n")

    curve = build_curve(CurveKind.LOWER, f"table:path={path}", params.h)

    assert curve.f(0.0) == pytest.approx(0.2)
    assert curve.f(-10.0) == pytest.approx(0.0)
    assert curve.f(10.0) == pytest.approx(0.1)
    assert curve.f_prime(10.0) == 0.0
    # PCHIP keeps the table's range
    assert all(0.0 <= curve.f(t / 10) <= 0.2 for t in range(-20, 21))


def test_table_curve_needs_increasing_y1(tmp_path, params):
    path = tmp_path / "lower.csv"
    path.write_text("y1,f\n0,0.0\n0,0.2\n")

    with pytest.raises(CurveDefinitionError):
        build_curve(CurveKind.LOWER, f"table:path={path}", params.h)


def test_table_curve_reports_bad_rows(tmp_path, params):
    path = tmp_path / "lower.csv"
    path.write_text("y1,f\n0,0.0\n1,oops\n")

    with pytest.raises(DataFormatError) as exc_info:
        build_curve(CurveKind.LOWER, f"table:path={path}", params.h)

    assert exc_info.value.line_number == 3


def test_straight_strip(params):
    strip = straight_strip(params.h)

    assert strip.within_band
    assert strip.gamma1.f(5.0) == 0.0
    assert strip.gamma2.f(5.0) == pytest.approx(params.h)
    assert strip.slope_bound == 0.0


def test_domain_from_mixed_families(params):
    domain = build_domain("bump:c0=0,height=0.2", "sinusoidal:c0=h,c1=-0.1", params.h)

    assert domain.gamma1.kind == CurveKind.LOWER
    assert domain.gamma2.kind == CurveKind.UPPER
    assert domain.slope_bound == pytest.approx(max(0.1, domain.gamma1.sup_abs_f_prime))
