import math
from typing import NamedTuple

import pydantic

from app import settings
from app.services.errors import KernelDomainError, SingularityError

__all__ = ["KernelParams", "Point2", "KernelGeometry", "kernel_geometry", "default_kernel_params"]


class KernelParams(pydantic.BaseModel):
    """
    Parameters of the kernel K(w) = (w + 3h - x2)^-1 exp(-a ch(i rho1 (w - h/2))).

    The band width h = pi/rho and the decay rate along the band edges a1 = a cos(rho1 h / 2) are derived.
    """
    rho: float = pydantic.Field(..., gt=0)
    a: float = pydantic.Field(..., gt=0)
    rho1: float = pydantic.Field(..., gt=0)

    class Config:
        frozen = True

    @pydantic.validator("rho", "a", "rho1")
    def check_finite(cls, v):
        if not math.isfinite(v):
            raise ValueError("must be finite")
        return v

    @pydantic.root_validator(skip_on_failure=True)
    def check_rho1_below_rho(cls, values):
        if not values["rho1"] < values["rho"]:
            raise ValueError(f"rho1 must satisfy 0 < rho1 < rho (rho1={values['rho1']}, rho={values['rho']})")
        return values

    @property
    def h(self) -> float:
        return math.pi / self.rho

    @property
    def a1(self) -> float:
        return self.a * math.cos(self.rho1 * self.h / 2)

    def decay_cosine(self, y2: float) -> float:
        """cos(rho1 (y2 - h/2)); positive wherever the kernel decays along the band."""
        return math.cos(self.rho1 * (y2 - self.h / 2))


def default_kernel_params(rho: float = None, a: float = None) -> KernelParams:
    """Settings defaults for whatever is not given; rho1 is always DEFAULT_RHO1_RATIO * rho."""
    rho = settings.DEFAULT_RHO if rho is None else rho
    a = settings.DEFAULT_A if a is None else a
    return KernelParams(rho=rho, a=a, rho1=settings.DEFAULT_RHO1_RATIO * rho)


class Point2(NamedTuple):
    y1: float
    y2: float


class KernelGeometry(NamedTuple):
    alpha2: float  # (y1 - x1)^2
    beta: float  # y2 - x2
    beta1: float  # y2 - x2 + 3h
    r2: float  # alpha^2 + beta^2
    r1sq: float  # alpha^2 + beta1^2


def kernel_geometry(y: Point2, x: Point2, params: KernelParams) -> KernelGeometry:
    if not all(math.isfinite(v) for v in (*y, *x)):
        raise KernelDomainError(f"Non-finite point: y={y}, x={x}")
    alpha2 = (y[0] - x[0]) ** 2
    beta = y[1] - x[1]
    beta1 = beta + 3 * params.h
    r2 = alpha2 + beta * beta
    if r2 == 0:
        raise SingularityError(f"Kernel is singular at y = x = {tuple(x)}")
    return KernelGeometry(alpha2, beta, beta1, r2, alpha2 + beta1 * beta1)
