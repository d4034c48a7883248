import math
from typing import List, Optional

import pydantic

from app import settings
from app.actions.core import ActionConfiguration
from app.domain.core import BandDomain
from app.domain.curves import build_domain
from app.kernel.core import KernelParams, default_kernel_params
from app.quadrature.core import QuadratureConfig
from app.services.errors import ConfigurationNotFound
from app.services.utils import find_config_for_action
from app.services.verification import SUITES


class KernelConfig(pydantic.BaseModel):
    rho: float = settings.DEFAULT_RHO
    a: float = settings.DEFAULT_A
    rho1: Optional[float] = None  # defaults to DEFAULT_RHO1_RATIO * rho

    class Config:
        extra = "forbid"

    @pydantic.root_validator(skip_on_failure=True)
    def check_kernel_invariants(cls, values):
        # Re-validate through KernelParams so violations surface at load time
        cls._params(values["rho"], values["a"], values.get("rho1"))
        return values

    @staticmethod
    def _params(rho: float, a: float, rho1: Optional[float]) -> KernelParams:
        if rho1 is None:
            return default_kernel_params(rho=rho, a=a)
        return KernelParams(rho=rho, a=a, rho1=rho1)

    def to_params(self) -> KernelParams:
        return self._params(self.rho, self.a, self.rho1)


class DomainConfig(pydantic.BaseModel):
    lower: str = "flat:c0=0"
    upper: str = "flat:c0=h"

    class Config:
        extra = "forbid"

    def build(self, h: float) -> BandDomain:
        return build_domain(self.lower, self.upper, h)


class TraceSettings(pydantic.BaseModel):
    lower_trace: str
    upper_trace: str
    lower_growth_c: Optional[float] = pydantic.Field(None, ge=0)
    upper_growth_c: Optional[float] = pydantic.Field(None, ge=0)


class KernelEvalConfig(ActionConfiguration):
    points: Optional[str] = None  # CSV y1,y2,x1,x2; --points overrides


class VerifyConfig(ActionConfiguration):
    suites: List[str] = pydantic.Field(default_factory=lambda: list(SUITES))

    @pydantic.validator("suites", each_item=True)
    def check_suite(cls, v):
        if v not in SUITES:
            raise ValueError(f"unknown suite '{v}' (known: {', '.join(SUITES)})")
        return v


class ReconstructConfig(ActionConfiguration, TraceSettings):
    points: Optional[str] = None  # CSV x1,x2; --points overrides


class DecayReportConfig(ActionConfiguration, TraceSettings):
    radii: List[float] = pydantic.Field(..., min_items=1)
    x2_fractions: List[float] = pydantic.Field([1 / 3, 1 / 2, 2 / 3], min_items=1)  # x2 = fraction * h

    @pydantic.validator("radii", "x2_fractions", each_item=True)
    def check_positive(cls, v):
        if not (math.isfinite(v) and v > 0):
            raise ValueError("must be positive and finite")
        return v


class RunConfig(pydantic.BaseModel):
    kernel: KernelConfig = KernelConfig()
    domain: DomainConfig = DomainConfig()
    quadrature: QuadratureConfig = QuadratureConfig()
    kernel_eval: Optional[KernelEvalConfig] = None
    verify: Optional[VerifyConfig] = None
    reconstruct: Optional[ReconstructConfig] = None
    decay_report: Optional[DecayReportConfig] = None

    class Config:
        extra = "forbid"

    def with_tolerance(self, tol: float) -> "RunConfig":
        """Copy with quadrature tolerances overridden (--tol)."""
        return self.copy(update={"quadrature": self.quadrature.with_tolerance(tol)})


# Commands that can run without their block in the run configuration
_DEFAULTABLE = {"kernel-eval", "verify"}


def get_action_configuration(run_config: RunConfig, action_id: str, config_model):
    action_config = find_config_for_action(configurations=run_config, action_id=action_id)
    if action_config is None:
        if action_id in _DEFAULTABLE:
            return config_model()
        raise ConfigurationNotFound(
            f"Settings for command '{action_id}' are missing. "
            f"Add a '{action_id.replace('-', '_')}' block to the run configuration."
        )
    return config_model.parse_obj(action_config.dict())
