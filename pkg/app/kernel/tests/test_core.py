import math

import pydantic
import pytest

from app.kernel.core import KernelParams, Point2, default_kernel_params, kernel_geometry
from app.services.errors import KernelDomainError, SingularityError


def test_derived_quantities(params):
    assert params.h == pytest.approx(math.pi)
    assert params.a1 == pytest.approx(3 * math.cos(math.pi / 4))
    assert params.decay_cosine(params.h / 2) == 1.0


def test_default_params_follow_settings():
    params = default_kernel_params(rho=2.0)

    assert params.rho == 2.0
    assert params.rho1 == pytest.approx(1.0)
    assert params.a == 3.0


@pytest.mark.parametrize(
    "rho,a,rho1",
    [
        (1.0, 3.0, 1.0),
        (1.0, 3.0, 1.5),
        (0.0, 3.0, 0.5),
        (1.0, -1.0, 0.5),
        (1.0, 3.0, 0.0),
        (math.inf, 3.0, 0.5),
        (1.0, math.nan, 0.5),
    ],
)
def test_invalid_params_are_rejected(rho, a, rho1):
    with pytest.raises(pydantic.ValidationError):
        KernelParams(rho=rho, a=a, rho1=rho1)


def test_params_are_immutable(params):
    with pytest.raises(TypeError):
        params.a = 5.0


def test_geometry(params):
    geometry = kernel_geometry(Point2(1.0, 1.0), Point2(-1.0, 2.0), params)

    assert geometry.alpha2 == 4.0
    assert geometry.beta == -1.0
    assert geometry.beta1 == pytest.approx(-1.0 + 3 * math.pi)
    assert geometry.r2 == 5.0
    assert geometry.r1sq == pytest.approx(4.0 + (3 * math.pi - 1.0) ** 2)


def test_geometry_rejects_coincident_points(params):
    with pytest.raises(SingularityError):
        kernel_geometry(Point2(0.0, 1.0), Point2(0.0, 1.0), params)


def test_geometry_rejects_non_finite_points(params):
    with pytest.raises(KernelDomainError):
        kernel_geometry(Point2(math.nan, 1.0), Point2(0.0, 1.0), params)
