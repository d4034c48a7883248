import logging
import math

import numpy as np
import pydantic
from scipy import interpolate

from app.services.errors import CurveDefinitionError, DataFormatError
from app.services.utils import parse_family_id, read_csv_table, resolve_params
from .core import BandDomain, BoundaryCurve, CurveKind

__all__ = ["CURVE_FAMILIES", "build_curve", "build_domain", "straight_strip", "table_curve"]

logger = logging.getLogger(__name__)

# Margin on the sampled derivative bound of tabulated curves.
_TABLE_SLOPE_MARGIN = 1.02


def _flat(kind, family_id, p):
    c0 = p["c0"]
    return BoundaryCurve(
        kind=kind, family_id=family_id, f=lambda t: c0, f_prime=lambda t: 0.0, sup_abs_f=abs(c0), sup_abs_f_prime=0.0
    )


def _sinusoidal(kind, family_id, p):
    # f(t) = c0 + c1 sin(c2 t + c3)
    c0, c1, c2, c3 = p["c0"], p["c1"], p["c2"], p["c3"]
    return BoundaryCurve(
        kind=kind,
        family_id=family_id,
        f=lambda t: c0 + c1 * math.sin(c2 * t + c3),
        f_prime=lambda t: c1 * c2 * math.cos(c2 * t + c3),
        sup_abs_f=abs(c0) + abs(c1),
        sup_abs_f_prime=abs(c1 * c2),
    )


def _bump(kind, family_id, p):
    # Gaussian bump f(t) = c0 + height exp(-((t - center)/width)^2)
    c0, height, center, width = p["c0"], p["height"], p["center"], p["width"]
    if not width > 0:
        raise CurveDefinitionError(f"{family_id}: width must be positive")

    def f(t):
        return c0 + height * math.exp(-((t - center) / width) ** 2)

    def f_prime(t):
        s = (t - center) / width
        return -2 * height * s / width * math.exp(-s * s)

    return BoundaryCurve(
        kind=kind,
        family_id=family_id,
        f=f,
        f_prime=f_prime,
        sup_abs_f=abs(c0) + abs(height),
        sup_abs_f_prime=abs(height) * math.sqrt(2) / width * math.exp(-0.5),
    )


def table_curve(kind: CurveKind, family_id: str, y1: np.ndarray, values: np.ndarray) -> BoundaryCurve:
    """Monotone cubic (PCHIP) interpolant of the samples, extended by constants beyond the table."""
    if len(y1) < 2:
        raise CurveDefinitionError(f"{family_id}: a curve table needs at least two rows")
    if not np.all(np.diff(y1) > 0):
        raise CurveDefinitionError(f"{family_id}: y1 must be strictly increasing")
    spline = interpolate.PchipInterpolator(y1, values, extrapolate=False)
    slope = spline.derivative()
    first, last = float(y1[0]), float(y1[-1])

    def f(t):
        return float(spline(min(max(t, first), last)))

    def f_prime(t):
        return float(slope(t)) if first <= t <= last else 0.0

    fine = np.linspace(first, last, 64 * len(y1))
    return BoundaryCurve(
        kind=kind,
        family_id=family_id,
        f=f,
        f_prime=f_prime,
        sup_abs_f=float(np.max(np.abs(values))),
        sup_abs_f_prime=float(np.max(np.abs(slope(fine)))) * _TABLE_SLOPE_MARGIN,
    )


def _table(kind, family_id, path):
    try:
        data = read_csv_table(path, ("y1", "f"))
    except DataFormatError:
        logger.exception(f"Cannot load curve table {path}")
        raise
    try:
        return table_curve(kind, family_id, data[:, 0], data[:, 1])
    except pydantic.ValidationError as e:
        raise CurveDefinitionError(f"Invalid curve table {path}: {e}")


CURVE_FAMILIES = {
    "flat": (_flat, ("c0",), {}),
    "sinusoidal": (_sinusoidal, ("c0", "c1"), {"c2": 1.0, "c3": 0.0}),
    "bump": (_bump, ("c0", "height"), {"center": 0.0, "width": 1.0}),
}


def build_curve(kind: CurveKind, family_id: str, h: float) -> BoundaryCurve:
    """
    Build a boundary curve from an identifier, e.g. "flat:c0=h", "sinusoidal:c0=0,c1=0.1,c2=1,c3=0",
    "bump:c0=0,height=0.2,center=0,width=1" or "table:path=curve.csv". Values may use the token h.
    """
    name, raw = parse_family_id(family_id)
    kind = CurveKind(kind)
    if name == "table":
        if set(raw) != {"path"}:
            raise CurveDefinitionError(f"table curves take exactly one parameter, path: {family_id!r}")
        return _table(kind, family_id, raw["path"])
    if name not in CURVE_FAMILIES:
        raise CurveDefinitionError(f"Unknown curve family {name!r} (known: table, {', '.join(CURVE_FAMILIES)})")
    factory, required, defaults = CURVE_FAMILIES[name]
    params = resolve_params(name, raw, required, defaults, h=h)
    try:
        return factory(kind, family_id, params)
    except pydantic.ValidationError as e:
        raise CurveDefinitionError(f"Invalid curve {family_id!r}: {e}")


def build_domain(lower_id: str, upper_id: str, h: float) -> BandDomain:
    gamma1 = build_curve(CurveKind.LOWER, lower_id, h)
    gamma2 = build_curve(CurveKind.UPPER, upper_id, h)
    try:
        return BandDomain(gamma1=gamma1, gamma2=gamma2, h=h)
    except pydantic.ValidationError as e:
        raise CurveDefinitionError(f"Invalid domain ({lower_id}, {upper_id}): {e}")


def straight_strip(h: float) -> BandDomain:
    return build_domain("flat:c0=0", "flat:c0=h", h)
