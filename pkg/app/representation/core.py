import logging
import math
from enum import Enum
from typing import Callable, List, Optional, Tuple

import numpy as np
import pydantic
from scipy import interpolate

from app import settings
from app.analytic.core import growth_rate, harmonic_from_id, neumann_trace
from app.domain.core import BandDomain, CurveKind, PointClass, sample_grid
from app.services.errors import ConfigurationValidationError, CoverageError, CurveDefinitionError
from app.services.utils import parse_family_id, read_csv_table, resolve_params

__all__ = [
    "TraceSource",
    "CauchyTrace",
    "ReconstructionReport",
    "GrowthCertificate",
    "build_trace",
    "zero_trace",
]

logger = logging.getLogger(__name__)


class TraceSource(str, Enum):
    ANALYTIC = "analytic"
    EXP_GROWTH = "exp_growth"
    ZERO = "zero"
    TABLE = "table"


class CauchyTrace(pydantic.BaseModel):
    """
    Neumann data dU/dn along one boundary curve with its declared growth |dU/dn| <= M exp(c |y1|).
    coverage is the sampled y1 range of tabulated data (None when the data is defined everywhere).
    """
    curve: CurveKind
    source: TraceSource
    source_id: str
    growth_rate_c: float = pydantic.Field(..., ge=0)
    values: Callable[[float], float]
    coverage: Optional[Tuple[float, float]] = None
    sample_y1: Optional[List[float]] = None

    class Config:
        frozen = True
        arbitrary_types_allowed = True

    def __call__(self, y1: float) -> float:
        return self.values(y1)

    @property
    def is_zero(self) -> bool:
        return self.source == TraceSource.ZERO

    def check_coverage(self, required_y: float):
        if self.coverage is None:
            return
        low, high = self.coverage
        if low > -required_y or high < required_y:
            raise CoverageError(
                f"Trace {self.source_id} on {self.curve.value} covers [{low}, {high}], not [-Y, Y]",
                required_y=required_y,
            )

    @property
    def fitted_m(self) -> float:
        """Smallest M with |g(y1)| <= M exp(c |y1|) on the samples (table nodes or the domain sample grid)."""
        points = self.sample_y1 if self.sample_y1 is not None else sample_grid()
        c = self.growth_rate_c
        return max((abs(self.values(float(t))) * math.exp(-c * abs(t)) for t in points), default=0.0)


def zero_trace(curve: CurveKind) -> CauchyTrace:
    return CauchyTrace(
        curve=curve, source=TraceSource.ZERO, source_id="zero", growth_rate_c=0.0, values=lambda t: 0.0
    )


def _table_trace(curve, source_id, path, growth_rate_c):
    if growth_rate_c is None:
        raise ConfigurationValidationError(f"Tabulated trace {source_id} needs an explicit growth_rate_c")
    data = read_csv_table(path, ("y1", "value"))
    y1, values = data[:, 0], data[:, 1]
    if len(y1) < 2 or not np.all(np.diff(y1) > 0):
        raise CurveDefinitionError(f"Trace table {path}: needs at least two rows with strictly increasing y1")
    spline = interpolate.PchipInterpolator(y1, values, extrapolate=False)
    return CauchyTrace(
        curve=curve,
        source=TraceSource.TABLE,
        source_id=source_id,
        growth_rate_c=growth_rate_c,
        values=lambda t: float(spline(t)),
        coverage=(float(y1[0]), float(y1[-1])),
        sample_y1=[float(t) for t in y1],
    )


def build_trace(
        curve: CurveKind, source_id: str, domain: BandDomain, growth_rate_c: Optional[float] = None
) -> CauchyTrace:
    """
    Trace from an identifier:
      analytic:<harmonic id>   Neumann trace of an analytic function, e.g. "analytic:strip_mode:n=1,A=1,B=0"
      exp_growth:c=0.3,M=1     M exp(c |y1|)
      zero
      table:path=trace.csv     CSV with header y1,value
    growth_rate_c overrides the rate implied by the source (required for tables).
    """
    curve = CurveKind(curve)
    if source_id.startswith(f"{TraceSource.ANALYTIC.value}:"):
        fn = harmonic_from_id(source_id.split(":", 1)[1])
        c = growth_rate(fn) if growth_rate_c is None else growth_rate_c
        return CauchyTrace(
            curve=curve,
            source=TraceSource.ANALYTIC,
            source_id=source_id,
            growth_rate_c=c,
            values=lambda t: neumann_trace(fn, domain, curve, t),
        )
    name, raw = parse_family_id(source_id)
    if name == TraceSource.ZERO:
        resolve_params(name, raw, ())
        return zero_trace(curve)
    if name == TraceSource.EXP_GROWTH:
        p = resolve_params(name, raw, ("c",), {"M": 1.0}, h=domain.h)
        if p["c"] < 0:
            raise CurveDefinitionError(f"exp_growth rate must be non-negative: {source_id!r}")
        m, c = p["M"], p["c"]
        return CauchyTrace(
            curve=curve,
            source=TraceSource.EXP_GROWTH,
            source_id=source_id,
            growth_rate_c=c if growth_rate_c is None else growth_rate_c,
            values=lambda t: m * math.exp(c * abs(t)),
        )
    if name == TraceSource.TABLE:
        if set(raw) != {"path"}:
            raise CurveDefinitionError(f"table traces take exactly one parameter, path: {source_id!r}")
        return _table_trace(curve, source_id, raw["path"], growth_rate_c)
    raise CurveDefinitionError(f"Unknown trace source {name!r} (known: {', '.join(s.value for s in TraceSource)})")


class ReconstructionReport(pydantic.BaseModel):
    x: Tuple[float, float]
    value: float
    I1: float
    I2: float
    truncation_Y: float
    quad_error: float
    classification: PointClass
    converged: bool = True
    # False when the truncation is best effort (data growth c >= rho/2)
    certified: bool = True

    @pydantic.root_validator(skip_on_failure=True)
    def check_sign_convention(cls, values):
        expected = -(values["I1"] + values["I2"])
        if values["value"] != expected:
            raise ValueError(f"value must equal -(I1 + I2): {values['value']!r} != {expected!r}")
        if not math.isfinite(values["quad_error"]):
            raise ValueError("quad_error must be finite")
        return values


class GrowthCertificate(pydantic.BaseModel):
    """Fitted envelope |I_j(x1, h/2)| <= C exp(c_hat x1) over the sampled x1."""
    curve: CurveKind
    declared_c: float
    c_hat: float
    C: float
    tolerance: float = settings.GROWTH_FIT_TOLERANCE
    x1_samples: List[float]
    integrals: List[float]
    passed: bool
