"""JSON records for geometry values and deterministic CSV output.

CSV files start with a single ``#``-prefixed header line carrying the
timestamp; everything after it is a deterministic function of the data, so
reruns on identical inputs produce byte-identical bodies.
"""

from __future__ import annotations

import json
import time
from pathlib import Path

from .halfplane import GeodesicArc, ThinRectangle, TruncatedSector

__all__ = [
    "geometry_to_json",
    "geometry_from_json",
    "write_csv",
    "read_csv_body",
    "write_json",
]


def geometry_to_json(obj) -> dict:
    if isinstance(obj, GeodesicArc):
        return {
            "type": "geodesic",
            "form": obj.form,
            "c": obj.c,
            "radius": obj.radius,
            "span": list(obj.span),
        }
    if isinstance(obj, ThinRectangle):
        return {
            "type": "rectangle",
            "left": geometry_to_json(obj.left),
            "right": geometry_to_json(obj.right),
            "y_low": obj.y_low,
            "y_high": obj.y_high,
        }
    if isinstance(obj, TruncatedSector):
        return {"type": "sector", "eps": obj.eps, "H": obj.H}
    raise TypeError(f"no JSON record for {type(obj).__name__}")


def geometry_from_json(doc: dict):
    kind = doc.get("type")
    if kind == "geodesic":
        return GeodesicArc(doc["form"], doc["c"], doc.get("radius", 0.0), tuple(doc["span"]))
    if kind == "rectangle":
        return ThinRectangle(
            geometry_from_json(doc["left"]),
            geometry_from_json(doc["right"]),
            doc["y_low"],
            doc["y_high"],
        )
    if kind == "sector":
        return TruncatedSector(eps=doc["eps"], H=doc["H"])
    raise ValueError(f"unknown geometry record type {kind!r}")


def _fmt(v) -> str:
    if isinstance(v, float):
        return repr(v)
    return str(v)


def write_csv(path, columns, rows, stamp: bool = True) -> None:
    """Write rows with a timestamp segregated to a leading comment line."""
    path = Path(path)
    lines = []
    if stamp:
        lines.append(f"# generated {time.strftime('%Y-%m-%dT%H:%M:%S')}")
    lines.append(",".join(columns))
    for row in rows:
        lines.append(",".join(_fmt(v) for v in row))
    path.write_text("\n".join(lines) + "\n")


def read_csv_body(path) -> str:
    """CSV content with comment lines stripped (the deterministic part)."""
    text = Path(path).read_text().splitlines()
    return "\n".join(l for l in text if not l.startswith("#")) + "\n"


def write_json(path, doc: dict) -> None:
    Path(path).write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")
