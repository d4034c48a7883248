import cmath
import math
from enum import Enum
from typing import ClassVar, Tuple, Union

import pydantic

from app import settings
from app.domain.core import BandDomain, CurveKind, boundary_point, exterior_normal
from app.kernel.core import Point2
from app.services.errors import CurveDefinitionError
from app.services.utils import parse_family_id, resolve_params

__all__ = [
    "HarmonicFamily",
    "StripMode",
    "EntireHarmonic",
    "ZeroHarmonic",
    "HarmonicFunction",
    "eval_U",
    "eval_grad_U",
    "neumann_trace",
    "discrete_laplacian",
    "growth_rate",
    "harmonic_from_id",
]

# Exponential rate charged per polynomial degree when a truncation radius needs a growth bound.
POLY_GROWTH_PER_DEGREE = 0.3


class _Holomorphic(pydantic.BaseModel):
    """U = Re g or Im g for an entire g(z), z = y1 + i y2; gradients follow from Cauchy-Riemann."""

    class Config:
        frozen = True

    imaginary_part: ClassVar[bool] = False

    def holomorphic(self, z: complex) -> Tuple[complex, complex]:
        raise NotImplementedError

    def value(self, y: Point2) -> float:
        g, _ = self.holomorphic(complex(y[0], y[1]))
        return g.imag if self.imaginary_part else g.real

    def gradient(self, y: Point2) -> Tuple[float, float]:
        _, dg = self.holomorphic(complex(y[0], y[1]))
        if self.imaginary_part:
            return dg.imag, dg.real
        return dg.real, -dg.imag


class StripMode(_Holomorphic):
    """U(y) = sin(n rho y2) (A exp(n rho y1) + B exp(-n rho y1)) = Im(A e^{kz} - B e^{-kz}), k = n rho."""
    n: int = pydantic.Field(..., gt=0)
    coefA: float
    coefB: float
    rho: float = pydantic.Field(..., gt=0)

    imaginary_part: ClassVar[bool] = True

    @property
    def k(self) -> float:
        return self.n * self.rho

    def holomorphic(self, z):
        up, down = self.coefA * cmath.exp(self.k * z), self.coefB * cmath.exp(-self.k * z)
        return up - down, self.k * (up + down)

    def value(self, y):
        # closed form keeps the zeros on y2 = 0 and y2 = h exact
        k = self.k
        return math.sin(k * y[1]) * (self.coefA * math.exp(k * y[0]) + self.coefB * math.exp(-k * y[0]))


class HarmonicFamily(str, Enum):
    RE_EXP = "re_exp"
    IM_EXP = "im_exp"
    RE_POLY = "re_poly"
    IM_POLY = "im_poly"


class EntireHarmonic(_Holomorphic):
    """Re/Im of exp(lambda z) (parameter lambda) or of z^k (parameter k)."""
    family: HarmonicFamily
    parameter: float

    @pydantic.validator("parameter")
    def check_parameter(cls, v, values):
        if not math.isfinite(v):
            raise ValueError("parameter must be finite")
        if values.get("family") in (HarmonicFamily.RE_POLY, HarmonicFamily.IM_POLY) and not (
                v >= 0 and float(v).is_integer()
        ):
            raise ValueError(f"polynomial degree must be a non-negative integer, got {v}")
        return v

    @property
    def imaginary_part(self):
        return self.family in (HarmonicFamily.IM_EXP, HarmonicFamily.IM_POLY)

    @property
    def is_polynomial(self) -> bool:
        return self.family in (HarmonicFamily.RE_POLY, HarmonicFamily.IM_POLY)

    def holomorphic(self, z):
        if self.is_polynomial:
            k = int(self.parameter)
            return z ** k, (k * z ** (k - 1) if k > 0 else 0j)
        g = cmath.exp(self.parameter * z)
        return g, self.parameter * g


class ZeroHarmonic(_Holomorphic):
    def holomorphic(self, z):
        return 0j, 0j

    def value(self, y):
        return 0.0

    def gradient(self, y):
        return 0.0, 0.0


HarmonicFunction = Union[StripMode, EntireHarmonic, ZeroHarmonic]


def eval_U(fn: HarmonicFunction, y: Point2) -> float:
    return fn.value(y)


def eval_grad_U(fn: HarmonicFunction, y: Point2) -> Tuple[float, float]:
    return fn.gradient(y)


def neumann_trace(fn: HarmonicFunction, domain: BandDomain, curve: CurveKind, y1: float) -> float:
    """dU/dn on the curve: gradient at the boundary point dotted with the exterior normal."""
    gx, gy = fn.gradient(boundary_point(domain, curve, y1))
    nx, ny = exterior_normal(domain, curve, y1)
    return gx * nx + gy * ny


def discrete_laplacian(fn: HarmonicFunction, y: Point2, step: float) -> float:
    y1, y2 = y
    return (
        fn.value((y1 + step, y2)) + fn.value((y1 - step, y2)) + fn.value((y1, y2 + step))
        + fn.value((y1, y2 - step)) - 4 * fn.value((y1, y2))
    ) / (step * step)


def growth_rate(fn: HarmonicFunction) -> float:
    """Exponential rate c with |U|, |grad U| <= M exp(c |y1|) along the band."""
    if isinstance(fn, StripMode):
        return fn.k if (fn.coefA or fn.coefB) else 0.0
    if isinstance(fn, EntireHarmonic):
        if fn.is_polynomial:
            return POLY_GROWTH_PER_DEGREE * fn.parameter
        return abs(fn.parameter)
    return 0.0


def harmonic_from_id(identifier: str) -> HarmonicFunction:
    """
    "strip_mode:n=1,A=1,B=0,rho=1" (rho defaults to the configured band frequency), "re_exp:lambda=0.4",
    "im_exp:lambda=0.4", "re_poly:k=2", "im_poly:k=2" or "zero".
    """
    name, raw = parse_family_id(identifier)
    try:
        if name == "zero":
            resolve_params(name, raw, ())
            return ZeroHarmonic()
        if name == "strip_mode":
            p = resolve_params(name, raw, ("n",), {"A": 1.0, "B": 0.0, "rho": settings.DEFAULT_RHO})
            if not p["n"].is_integer():
                raise CurveDefinitionError(f"strip_mode index n must be an integer, got {p['n']}")
            return StripMode(n=int(p["n"]), coefA=p["A"], coefB=p["B"], rho=p["rho"])
        if name in (HarmonicFamily.RE_EXP, HarmonicFamily.IM_EXP):
            p = resolve_params(name, raw, ("lambda",))
            return EntireHarmonic(family=name, parameter=p["lambda"])
        if name in (HarmonicFamily.RE_POLY, HarmonicFamily.IM_POLY):
            p = resolve_params(name, raw, ("k",))
            return EntireHarmonic(family=name, parameter=p["k"])
    except pydantic.ValidationError as e:
        raise CurveDefinitionError(f"Invalid harmonic function {identifier!r}: {e}")
    raise CurveDefinitionError(
        f"Unknown harmonic family {name!r} (known: strip_mode, zero, {', '.join(f.value for f in HarmonicFamily)})"
    )
