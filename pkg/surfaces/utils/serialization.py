# surfaces/utils/serialization.py
from __future__ import annotations

import csv
import io
import json
import math
from typing import Any, Iterable

import numpy as np
from django.template.loader import render_to_string

POINT_SCHEMA = "geodev-point/1"
GRID_SCHEMA = "geodev-grid/1"
FIELD_SCHEMA = "geodev-field/1"
TRACE_SCHEMA = "geodev-trace/1"


def plain(obj: Any) -> Any:
    """numpy / tuples / non-finite floats → JSON-ready python values."""
    if isinstance(obj, dict):
        return {str(k): plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return plain(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return x if math.isfinite(x) else None
    return obj


def dump_json(report: dict) -> str:
    # float repr is the shortest string that round-trips (at most 17 digits)
    return json.dumps(plain(report), sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def load_json(text: str) -> dict:
    return json.loads(text)


# ---------- CSV ----------
def _fmt(x: float) -> str:
    return repr(float(x))


def grid_csv(scan) -> str:
    buf = io.StringIO()
    buf.write(f"# schema: {GRID_SCHEMA}; kind: {scan.kind}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["i", "j", "u", "v", "count", "class", "angles"])
    nu, nv = scan.resolution
    for i in range(nu):
        for j in range(nv):
            w.writerow([
                i,
                j,
                _fmt(scan.u[i]),
                _fmt(scan.v[j]),
                int(scan.counts[i, j]),
                scan.classes[i][j],
                ";".join(_fmt(t) for t in scan.angles[i][j]),
            ])
    return buf.getvalue()


def read_grid_csv(text: str) -> list[dict]:
    lines = [ln for ln in text.splitlines() if not ln.startswith("#")]
    return list(csv.DictReader(lines))


# ---------- SVG ----------
def svg_path(points: Iterable) -> str:
    pts = [f"{p[0]:.9g} {p[1]:.9g}" for p in points]
    if not pts:
        return ""
    return "M " + " L ".join(pts)


def render_field_svg(context: dict) -> str:
    return render_to_string("surfaces/field.svg", context)
