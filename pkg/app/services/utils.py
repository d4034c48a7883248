import csv
import math
import re
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence, TextIO, Tuple

import numpy as np

from app.services.errors import CurveDefinitionError, DataFormatError


def find_config_for_action(configurations, action_id: str):
    """Command block of a run configuration (None when the block is absent)."""
    return getattr(configurations, action_id.replace("-", "_"), None)


def parse_family_id(identifier: str) -> Tuple[str, Dict[str, str]]:
    """
    Split a family identifier "name:key=value,key=value" into its name and raw parameters.
    A bare "name" has no parameters.
    """
    name, _, raw = identifier.strip().partition(":")
    if not name:
        raise CurveDefinitionError(f"Empty family identifier: {identifier!r}")
    params = {}
    for item in filter(None, (part.strip() for part in raw.split(","))):
        key, sep, value = item.partition("=")
        if not sep or not key.strip():
            raise CurveDefinitionError(f"Malformed parameter {item!r} in {identifier!r}")
        params[key.strip()] = value.strip()
    return name.strip(), params


_BAND_TOKEN = re.compile(r"^(?P<sign>[+-]?)(?:(?P<coef>[0-9.]+(?:[eE][+-]?[0-9]+)?)\*?)?h(?:/(?P<div>[0-9.]+(?:[eE][+-]?[0-9]+)?))?$")


def resolve_number(token: str, h: Optional[float] = None) -> float:
    """A float, or a multiple of the band width written as h, -h, 0.5*h, 2h or h/2."""
    token = token.strip()
    match = _BAND_TOKEN.match(token)
    if match:
        if h is None:
            raise CurveDefinitionError(f"Band-width token {token!r} used where h is unknown")
        value = h * float(match["coef"] or 1.0) / float(match["div"] or 1.0)
        return -value if match["sign"] == "-" else value
    try:
        value = float(token)
    except ValueError:
        raise CurveDefinitionError(f"Not a number: {token!r}")
    if not math.isfinite(value):
        raise CurveDefinitionError(f"Non-finite parameter: {token!r}")
    return value


def resolve_params(
        family: str, raw: Dict[str, str], required: Sequence[str], defaults: Dict[str, float] = None,
        h: Optional[float] = None
) -> Dict[str, float]:
    defaults = defaults or {}
    unknown = set(raw) - set(required) - set(defaults)
    if unknown:
        raise CurveDefinitionError(f"Unknown parameters for {family}: {', '.join(sorted(unknown))}")
    missing = [key for key in required if key not in raw]
    if missing:
        raise CurveDefinitionError(f"Missing parameters for {family}: {', '.join(missing)}")
    values = dict(defaults)
    values.update({key: resolve_number(value, h) for key, value in raw.items()})
    return values


def read_csv_table(path, columns: Sequence[str]) -> np.ndarray:
    """
    Read a headered CSV of floats into an array with one column per requested name.

    The header is mandatory and must contain every requested column; extra columns are ignored.
    Errors carry the 1-based line number of the offending row.
    """
    path = Path(path)
    try:
        handle = path.open(newline="", encoding="utf-8")
    except OSError as e:
        raise DataFormatError(f"Cannot open table: {e}", path=path)
    with handle:
        reader = csv.reader(handle)
        header = next(reader, None)
        if header is None:
            raise DataFormatError("Missing header row", line_number=1, path=path)
        header = [name.strip() for name in header]
        missing = [name for name in columns if name not in header]
        if missing:
            raise DataFormatError(
                f"Header {','.join(header)} lacks column(s) {', '.join(missing)}", line_number=1, path=path
            )
        indices = [header.index(name) for name in columns]
        rows: List[List[float]] = []
        for row in reader:
            line_number = reader.line_num
            if not row or all(not cell.strip() for cell in row):
                continue
            if len(row) != len(header):
                raise DataFormatError(
                    f"Expected {len(header)} fields, found {len(row)}", line_number=line_number, path=path
                )
            try:
                values = [float(row[i]) for i in indices]
            except ValueError:
                raise DataFormatError(f"Non-numeric field in {row}", line_number=line_number, path=path)
            if not all(math.isfinite(v) for v in values):
                raise DataFormatError(f"Non-finite field in {row}", line_number=line_number, path=path)
            rows.append(values)
    return np.array(rows, dtype=float).reshape(len(rows), len(columns))


def format_cell(value) -> str:
    # repr gives the shortest string that round-trips, so reruns are byte-identical
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    if value is None:
        return ""
    return str(value)


def write_csv(stream: TextIO, header: Sequence[str], rows: Iterable[Sequence]):
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([format_cell(value) for value in row])
