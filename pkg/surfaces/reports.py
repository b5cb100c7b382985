# surfaces/reports.py
"""
Assemble the point report, the grid / field-line outputs and the oracle
verification block served by the management command and the views.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .deviation import deviation_report
from . import conf
from .directions import (
    asymptotic_directions_r5,
    check_field_kind,
    directions_for,
    extremal_frontal_directions,
    extremal_lateral_directions,
    lateral_form,
    r3_special_directions,
    strong_principal_directions,
    umbilic_focus,
)
from .exceptions import GeometryError, SeedError
from .fields import INF, discriminant_curve, scan_grid, trace_line
from .frames import build_point_geometry, classify_point, ellipse_axes
from .oracle import dense_theta_search, fd_jet_check, taylor_remainder_slope
from .surface_dsl import SurfaceChart
from .utils import binary_forms as bf
from .utils.serialization import FIELD_SCHEMA, POINT_SCHEMA, TRACE_SCHEMA, grid_csv, render_field_svg, svg_path

logger = logging.getLogger(__name__)

DEFAULT_THETAS = (0.0,)
ORACLE_SAMPLES = 20000


# =========================
# Point report
# =========================
def point_report(
    chart: SurfaceChart,
    u: float,
    v: float,
    thetas: Optional[Sequence[float]] = None,
    verify: bool = False,
) -> dict:
    pg = build_point_geometry(chart, u, v)
    cls = classify_point(pg)
    n = pg.ambient_dim
    thetas = sorted(DEFAULT_THETAS if not thetas else thetas)

    report: dict = {
        "schema": POINT_SCHEMA,
        "surface": chart.name,
        "ambient_dim": n,
        "u": float(u),
        "v": float(v),
        "m": pg.m,
        "t1": pg.t1,
        "t2": pg.t2,
        "normal_basis": pg.normal_basis,
        "b1": pg.b1,
        "b2": pg.b2,
        "b3": pg.b3,
        "Db": pg.Db,
        "H": pg.H,
        "B": pg.B,
        "C": pg.C,
        "q": pg.q,
        "r": pg.r,
        "class": cls.tag,
        "aligned_frame_angle": cls.aligned_frame_angle,
        "ellipse_axes": list(ellipse_axes(pg)),
        "deviation": [dict(theta=t, **deviation_report(pg, t).as_dict()) for t in thetas],
    }

    frontal = extremal_frontal_directions(pg)
    report["extremal_frontal"] = frontal.as_dict()
    report["extremal_frontal_angles"] = list(frontal.angles)
    if frontal.identically_zero:
        # |η| is constant: every direction has the same frontal deviation
        report["frontal_deviation_const"] = deviation_report(pg, 0.0).frontal

    lateral = extremal_lateral_directions(pg)
    report["extremal_lateral"] = lateral.as_dict()
    report["extremal_lateral_angles"] = list(lateral.angles)

    if n == 3:
        special = r3_special_directions(pg)
        report["principal"] = special.principal.as_dict()
        report["asymptotic"] = special.asymptotic.as_dict()
    elif n == 4:
        strong = strong_principal_directions(pg)
        report["strong_principal"] = strong.directions.as_dict()
        report["ribs"] = [r.as_dict() for r in strong.ribs]
        report["umbilic_focus"] = umbilic_focus(pg).as_dict()
    elif n == 5:
        report["asymptotic_r5"] = asymptotic_directions_r5(pg).as_dict()

    if verify:
        report["verification"] = verification_block(chart, u, v, thetas)
    return report


# =========================
# Oracle verification
# =========================
def _match(solver: Sequence[float], oracle: Sequence[float]) -> float:
    """Worst distance (mod π) from any angle in one set to the nearest in the other."""
    def gap(a, b):
        d = abs(a - b) % math.pi
        return min(d, math.pi - d)

    if not solver and not oracle:
        return 0.0
    if not solver or not oracle:
        return math.inf
    worst = max(min(gap(a, b) for b in oracle) for a in solver)
    return max(worst, max(min(gap(a, b) for a in solver) for b in oracle))


def verification_block(chart: SurfaceChart, u: float, v: float, thetas: Sequence[float]) -> dict:
    pg = build_point_geometry(chart, u, v)
    H, B, C = pg.H, pg.B, pg.C
    out: dict = {}

    errors = fd_jet_check(chart, u, v)
    fd_tol, fd3_tol = conf.get("FD_TOL"), conf.get("FD3_TOL")
    angle_tol = conf.get("ORACLE_ANGLE_TOL")
    out["jets"] = {"errors": errors, "passed": errors[1] < fd_tol and errors[2] < fd_tol and errors[3] < fd3_tol}

    def eta2(t):
        t = np.asarray(t, dtype=float)[..., None]
        e = H + B * np.cos(2 * t) + C * np.sin(2 * t)
        return np.sum(e * e, axis=-1)

    frontal = extremal_frontal_directions(pg)
    dense = dense_theta_search(eta2, "extrema", ORACLE_SAMPLES)
    if frontal.identically_zero or dense.constant:
        ok = frontal.identically_zero and dense.constant
        out["extremal_frontal"] = {"identically_zero": frontal.identically_zero, "constant": dense.constant, "passed": ok}
    else:
        gap = _match(frontal.angles, dense.angles)
        out["extremal_frontal"] = {"oracle_angles": list(dense.angles), "max_gap": gap, "passed": gap < angle_tol}

    lateral = extremal_lateral_directions(pg)
    lform = lateral_form(pg)
    dense = dense_theta_search(lambda t: bf.evaluate(lform, t), "extrema", ORACLE_SAMPLES)
    if lateral.identically_zero or dense.constant:
        ok = lateral.identically_zero and dense.constant
        out["extremal_lateral"] = {"identically_zero": lateral.identically_zero, "constant": dense.constant, "passed": ok}
    else:
        gap = _match(lateral.angles, dense.angles)
        out["extremal_lateral"] = {"oracle_angles": list(dense.angles), "max_gap": gap, "passed": gap < angle_tol}

    slope_min = conf.get("TAYLOR_SLOPE_MIN")
    slopes = {}
    for t in thetas:
        try:
            slopes[repr(float(t))] = taylor_remainder_slope(chart, u, v, t)
        except GeometryError as e:
            logger.debug("taylor slope at θ=%g skipped: %s", t, e)
    out["taylor_remainder"] = {"slopes": slopes, "passed": all(s >= slope_min for s in slopes.values())}

    out["passed"] = all(block["passed"] for block in out.values())
    return out


# =========================
# Field outputs
# =========================
@dataclass
class FieldOutput:
    svg: str
    csv: str
    scan: object
    traces: list
    curve: object


def _subgrid(chart: SurfaceChart, seed_grid: tuple[int, int]) -> list[tuple[float, float]]:
    nu, nv = seed_grid
    (u0, u1), (v0, v1) = chart.u_range, chart.v_range
    us = [u0 + (u1 - u0) * (i + 0.5) / nu for i in range(nu)]
    vs = [v0 + (v1 - v0) * (j + 0.5) / nv for j in range(nv)]
    return [(a, b) for a in us for b in vs]


def field_output(
    chart: SurfaceChart,
    kind: str,
    grid: tuple[int, int] = (40, 40),
    seed_grid: tuple[int, int] = (3, 3),
    step: Optional[float] = None,
    max_len: Optional[float] = None,
    banner: str = "",
) -> FieldOutput:
    check_field_kind(kind, chart.ambient_dim)
    (u0, u1), (v0, v1) = chart.u_range, chart.v_range
    diag = math.hypot(u1 - u0, v1 - v0)
    step = step or diag / 100.0
    max_len = max_len or diag / 4.0

    scan = scan_grid(chart, kind, grid)
    curve = discriminant_curve(chart, grid, scan=scan) if kind == "extremal-frontal" else None
    degenerate = bool(np.all(scan.counts == INF))

    traces = []
    if not degenerate:
        for seed in _subgrid(chart, seed_grid):
            try:
                ds = directions_for(kind, build_point_geometry(chart, *seed))
            except GeometryError as e:
                logger.debug("seed %s skipped: %s", seed, e)
                continue
            if ds.identically_zero:
                continue
            for branch in range(len(ds)):
                for direction in (1, -1):
                    try:
                        traces.append(trace_line(chart, kind, seed, branch, step, max_len, direction=direction))
                    except SeedError as e:
                        logger.debug("trace from %s skipped: %s", seed, e)

    lines = [{"branch": t.branch, "d": svg_path(t.points)} for t in traces if len(t.points) > 1]
    context = {
        "schema": FIELD_SCHEMA,
        "surface_name": chart.name,
        "kind": kind,
        "banner": banner,
        "viewbox": f"{u0:.9g} {v0:.9g} {u1 - u0:.9g} {v1 - v0:.9g}",
        "domain": (u0, u1, v0, v1),
        "width": f"{u1 - u0:.9g}",
        "height": f"{v1 - v0:.9g}",
        "stroke": f"{diag * 0.002:.6g}",
        "thick_stroke": f"{diag * 0.006:.6g}",
        "font_size": f"{diag * 0.03:.6g}",
        "text_x": f"{u0 + 0.05 * (u1 - u0):.9g}",
        "text_y": f"{v0 + 0.1 * (v1 - v0):.9g}",
        "lines": lines,
        "discriminant": [svg_path(p) for p in curve.polylines] if curve else [],
        "degenerate": degenerate,
    }
    return FieldOutput(render_field_svg(context), grid_csv(scan), scan, traces, curve)


def trace_report(chart: SurfaceChart, kind: str, seed, branch: int, step: float, max_len: float, direction: int = 1) -> dict:
    tr = trace_line(chart, kind, seed, branch, step, max_len, direction=direction)
    return {
        "schema": TRACE_SCHEMA,
        "surface": chart.name,
        "kind": kind,
        "seed": list(tr.seed),
        "branch": tr.branch,
        "termination": tr.termination,
        "points": tr.points,
        "angles": tr.angles,
        "orientation": tr.orientation,
        "max_residual": float(tr.residuals.max()) if len(tr.residuals) else 0.0,
        "tangent_ok": tr.tangent_ok,
    }
