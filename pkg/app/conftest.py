import json
import math

import mpmath
import pytest

from app.domain.curves import build_domain, straight_strip
from app.kernel.core import KernelParams, Point2
from app.quadrature.core import QuadratureConfig


@pytest.fixture
def params():
    return KernelParams(rho=1.0, a=3.0, rho1=0.5)


@pytest.fixture
def params_a1():
    return KernelParams(rho=1.0, a=1.0, rho1=0.5)


@pytest.fixture
def quad():
    return QuadratureConfig()


@pytest.fixture
def sharp_quad():
    return QuadratureConfig(abs_tol=1e-300, rel_tol=1e-13)


@pytest.fixture
def strip(params):
    return straight_strip(params.h)


@pytest.fixture
def curved_domain(params):
    # f1 = 0.1 sin y1, f2 = h - 0.1 cos y1
    return build_domain(
        "sinusoidal:c0=0,c1=0.1",
        "sinusoidal:c0=h,c1=-0.1,c2=1,c3=1.5707963267948966",
        params.h,
    )


@pytest.fixture
def mp_phi_integrand():
    """High-precision direct form of the kernel integrand, independent of app.kernel."""

    def integrand(u, y: Point2, x: Point2, params: KernelParams):
        h = mpmath.pi / params.rho
        alpha2 = (mpmath.mpf(y[0]) - x[0]) ** 2
        eta = mpmath.sqrt(mpmath.mpf(u) ** 2 + alpha2)
        w = mpmath.mpc(y[1], eta)
        k = mpmath.exp(-params.a * mpmath.cos(params.rho1 * (w - h / 2))) / (w + 3 * h - x[1])
        return mpmath.im(k / mpmath.mpc(mpmath.mpf(y[1]) - x[1], eta)) * u / eta

    return integrand


@pytest.fixture
def mp_phi(mp_phi_integrand):
    """Phi(y, x) by mpmath quadrature at 30 digits."""

    def phi(y: Point2, x: Point2, params: KernelParams) -> float:
        with mpmath.workdps(30):
            h = mpmath.pi / params.rho
            anchor = mpmath.exp(-params.a * mpmath.cos(params.rho1 * (mpmath.mpf(x[1]) - h / 2))) / (3 * h)
            nodes = [0, 0.25, 0.5, 1, 2, 4, 8, 16, 32]
            integral = mpmath.quad(lambda u: mp_phi_integrand(u, y, x, params), nodes)
            return float(-integral / (2 * mpmath.pi * anchor))

    return phi


@pytest.fixture
def write_points(tmp_path):
    def _write(header, rows, name="points.csv"):
        path = tmp_path / name
        lines = [",".join(header)] + [",".join(repr(float(v)) for v in row) for row in rows]
        path.write_text("\n".join(lines) + "\n")
        return path

    return _write


@pytest.fixture
def write_config(tmp_path):
    def _write(data, name="run.json"):
        path = tmp_path / name
        path.write_text(json.dumps(data))
        return path

    return _write


@pytest.fixture
def strip_mode_config():
    return {
        "kernel": {"rho": 1.0, "a": 3.0, "rho1": 0.5},
        "domain": {"lower": "flat:c0=0", "upper": "flat:c0=h"},
        "reconstruct": {
            "lower_trace": "analytic:strip_mode:n=1,A=1,B=0",
            "upper_trace": "analytic:strip_mode:n=1,A=1,B=0",
        },
    }


@pytest.fixture
def zero_trace_config():
    return {
        "kernel": {"rho": 1.0, "a": 3.0, "rho1": 0.5},
        "reconstruct": {"lower_trace": "zero", "upper_trace": "zero"},
        "decay_report": {"lower_trace": "zero", "upper_trace": "zero", "radii": [2.0, 3.0]},
    }


@pytest.fixture
def far_field_pair(params):
    return Point2(10.0, params.h / 2), Point2(0.0, params.h / 2)


@pytest.fixture
def half_band(params):
    return params.h / 2


@pytest.fixture
def strip_mode_exact():
    def exact(x):
        return math.sin(x[1]) * math.exp(x[0])

    return exact
