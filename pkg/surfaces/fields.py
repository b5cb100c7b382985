# surfaces/fields.py
"""
Direction fields over the parameter domain: grid scans, integral lines and
the discriminant curve of the extremal-frontal quartic.
"""
from __future__ import annotations

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from skimage import measure

from . import conf
from .directions import check_field_kind, defining_form, directions_for, frontal_quartic
from .exceptions import GeometryError, SeedError, SingularPointError
from .frames import build_point_geometry, classify_point
from .surface_dsl import SurfaceChart
from .utils import binary_forms as bf

logger = logging.getLogger(__name__)

INF = -1  # every direction qualifies
SINGULAR = -2  # chart not regular at the node
FAILED = -3  # any other per-node error

TERMINATIONS = ("boundary", "singular_point", "step_limit", "root_collision")


# =========================
# Grid scans
# =========================
@dataclass(frozen=True, eq=False)
class GridScan:
    kind: str
    u: np.ndarray  # (nu,)
    v: np.ndarray  # (nv,)
    counts: np.ndarray  # (nu, nv) int; INF / SINGULAR / FAILED sentinels
    angles: list  # angles[i][j] -> tuple of θ
    classes: list  # classes[i][j] -> point class tag or ""
    discriminant: np.ndarray  # (nu, nv) normalized quartic discriminant (NaN where undefined)
    messages: dict = field(default_factory=dict)  # (i, j) -> error text

    @property
    def resolution(self) -> tuple[int, int]:
        return self.counts.shape

    def count_values(self) -> set[int]:
        return {int(c) for c in np.unique(self.counts)}


def _parse_resolution(resolution) -> tuple[int, int]:
    if isinstance(resolution, int):
        nu = nv = resolution
    else:
        nu, nv = (int(x) for x in resolution)
    if nu < 2 or nv < 2:
        raise ValueError(f"grid resolution must be at least 2x2, got {nu}x{nv}")
    return nu, nv


def parse_grid(text: str) -> tuple[int, int]:
    """'NxM' (or a single 'N') → (N, M)."""
    parts = str(text).lower().replace("×", "x").split("x")
    try:
        dims = [int(p) for p in parts]
    except ValueError:
        raise ValueError(f"grid must look like NxM, got {text!r}") from None
    if len(dims) == 1:
        return _parse_resolution(dims[0])
    if len(dims) == 2:
        return _parse_resolution(tuple(dims))
    raise ValueError(f"grid must look like NxM, got {text!r}")


def grid_axes(chart: SurfaceChart, resolution) -> tuple[np.ndarray, np.ndarray]:
    nu, nv = _parse_resolution(resolution)
    return np.linspace(*chart.u_range, nu), np.linspace(*chart.v_range, nv)


def normalized_discriminant(form) -> float:
    s = bf.scale(form)
    if s == 0.0:
        return math.nan
    return float(bf.quartic_discriminant(np.asarray(form) / s))


def _scan_row(chart: SurfaceChart, kind: str, u: float, vs: Sequence[float]) -> list[dict]:
    row = []
    prev_seed = None
    for v in vs:
        cell = {"count": FAILED, "angles": (), "class": "", "disc": math.nan, "message": ""}
        try:
            pg = build_point_geometry(chart, u, v)
            if prev_seed is not None and pg.normal_seed != prev_seed:
                logger.debug("normal seed switch %s -> %s at (%g, %g)", prev_seed, pg.normal_seed, u, v)
            prev_seed = pg.normal_seed
            ds = directions_for(kind, pg)
            cell["class"] = classify_point(pg).tag
            if ds.identically_zero:
                cell["count"] = INF
            else:
                cell["count"] = len(ds)
                cell["angles"] = ds.angles
            quartic = frontal_quartic(pg)
            if bf.scale(quartic) > conf.get("ZERO_FORM_TOL") * pg.alpha_scale**2:
                cell["disc"] = normalized_discriminant(quartic)
        except SingularPointError as e:
            cell["count"] = SINGULAR
            cell["message"] = str(e)
        except GeometryError as e:
            logger.debug("grid node (%g, %g) failed: %s", u, v, e)
            cell["message"] = f"{type(e).__name__}: {e}"
        row.append(cell)
    return row


def scan_grid(chart: SurfaceChart, field_kind: str, resolution, workers: Optional[int] = None) -> GridScan:
    check_field_kind(field_kind, chart.ambient_dim)
    us, vs = grid_axes(chart, resolution)
    workers = conf.get("WORKERS") if workers is None else workers

    if workers and workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_scan_row, [chart] * len(us), [field_kind] * len(us), us, [vs] * len(us)))
    else:
        rows = [_scan_row(chart, field_kind, u, vs) for u in us]

    counts = np.array([[c["count"] for c in row] for row in rows], dtype=int)
    disc = np.array([[c["disc"] for c in row] for row in rows], dtype=float)
    messages = {
        (i, j): c["message"] for i, row in enumerate(rows) for j, c in enumerate(row) if c["message"]
    }
    return GridScan(
        kind=field_kind,
        u=us,
        v=vs,
        counts=counts,
        angles=[[c["angles"] for c in row] for row in rows],
        classes=[[c["class"] for c in row] for row in rows],
        discriminant=disc,
        messages=messages,
    )


# =========================
# Discriminant curve
# =========================
@dataclass(frozen=True, eq=False)
class DiscriminantCurve:
    polylines: list  # (K, 2) arrays of (u, v)
    degenerate: bool = False  # the quartic vanishes identically on the whole grid

    def __len__(self) -> int:
        return len(self.polylines)


def discriminant_curve(chart: SurfaceChart, resolution, scan: Optional[GridScan] = None) -> DiscriminantCurve:
    """
    Zero set of the binary-quartic discriminant of the extremal-frontal
    equation, by marching squares with linear interpolation.
    """
    if scan is None or scan.kind != "extremal-frontal" or scan.resolution != _parse_resolution(resolution):
        scan = scan_grid(chart, "extremal-frontal", resolution)
    disc = scan.discriminant
    valid = np.isfinite(disc)
    if not valid.any():
        return DiscriminantCurve([], degenerate=True)
    values = disc[valid]
    if float(values.max() - values.min()) <= 1e-14 or (values.min() >= 0.0) or (values.max() <= 0.0):
        return DiscriminantCurve([])

    contours = measure.find_contours(np.where(valid, disc, 0.0), 0.0, mask=valid)
    du = scan.u[1] - scan.u[0]
    dv = scan.v[1] - scan.v[0]
    polylines = []
    for c in contours:
        if len(c) < 2:
            continue
        polylines.append(np.column_stack([scan.u[0] + c[:, 0] * du, scan.v[0] + c[:, 1] * dv]))
    return DiscriminantCurve(polylines)


# =========================
# Integral lines
# =========================
@dataclass(frozen=True, eq=False)
class FieldTrace:
    seed: tuple[float, float]
    kind: str
    branch: int
    points: np.ndarray  # (N, 2) (u, v)
    angles: np.ndarray  # (N,) followed θ at each sample
    orientation: np.ndarray  # (N,) +1 / -1: parameter direction sign relative to t(θ)
    residuals: np.ndarray  # (N,) relative residual of the defining form at the followed θ
    termination: str

    @property
    def length(self) -> float:
        if len(self.points) < 2:
            return 0.0
        return float(np.linalg.norm(np.diff(self.points, axis=0), axis=1).sum())

    @property
    def tangent_ok(self) -> bool:
        """Every sample satisfies the defining equation within TRACE_TOL."""
        return bool(np.all(self.residuals < conf.get("TRACE_TOL")))


class _FieldBreak(Exception):
    def __init__(self, reason: str):
        super().__init__(reason)
        self.reason = reason


def _circular_gap(a: float, b: float) -> float:
    d = abs(a - b) % math.pi
    return min(d, math.pi - d)


@dataclass
class _Sample:
    direction: np.ndarray
    theta: float
    residual: float
    sign: float


# the followed root may turn at most this much between two samples; a bigger
# jump means it has disappeared (merged with a neighbour into a complex pair)
_MAX_ROOT_JUMP = 0.25


def _sample_field(chart, kind, p, ref_theta: float, ref_dir: np.ndarray) -> _Sample:
    if not chart.contains(p[0], p[1]):
        raise _FieldBreak("boundary")
    try:
        pg = build_point_geometry(chart, p[0], p[1])
    except SingularPointError:
        raise _FieldBreak("singular_point") from None
    ds = directions_for(kind, pg)
    if ds.identically_zero or not ds.angles:
        raise _FieldBreak("singular_point")
    # the count may change across the discriminant; only the followed root matters
    gaps = [_circular_gap(t, ref_theta) for t in ds.angles]
    k = int(np.argmin(gaps))
    if gaps[k] > _MAX_ROOT_JUMP:
        raise _FieldBreak("root_collision")
    theta = ds.angles[k]
    others = [_circular_gap(t, theta) for i, t in enumerate(ds.angles) if i != k]
    if others and min(others) < 5 * conf.get("MERGE_TOL"):
        raise _FieldBreak("root_collision")
    d = pg.parameter_direction(theta)
    d = d / np.linalg.norm(d)
    sign = 1.0 if float(d @ ref_dir) >= 0.0 else -1.0
    form = defining_form(kind, pg)
    residual = abs(float(bf.evaluate(form, theta))) / max(bf.scale(form), 1e-300)
    return _Sample(sign * d, theta, residual, sign)


def branch_index(chart: SurfaceChart, kind: str, point, theta: float) -> int:
    """Index of the root at ``point`` closest (mod π) to θ."""
    pg = build_point_geometry(chart, point[0], point[1])
    ds = directions_for(kind, pg)
    if ds.identically_zero or not ds.angles:
        raise SeedError(f"no isolated {kind} direction at {tuple(point)}")
    return int(np.argmin([_circular_gap(t, theta) for t in ds.angles]))


def trace_line(
    chart: SurfaceChart,
    field_kind: str,
    seed,
    branch: int,
    step: float,
    max_len: float,
    direction: int = 1,
    max_steps: int = 100000,
) -> FieldTrace:
    """
    Fixed-step RK4 along the unit parameter-space direction of one root of
    the field, following the root closest (mod π) to the previous one.
    The step is halved when the followed root meets another one or
    vanishes; below ``step / 1024`` the trace stops. A change in the number
    of roots elsewhere on the circle does not stop the line.
    """
    check_field_kind(field_kind, chart.ambient_dim)
    if step <= 0 or max_len <= 0:
        raise ValueError("step and max_len must be positive")
    p = np.asarray(seed, dtype=float)
    if not chart.contains(p[0], p[1]):
        raise SeedError(f"seed {tuple(p)} lies outside the chart domain")
    try:
        pg = build_point_geometry(chart, p[0], p[1])
    except SingularPointError as e:
        raise SeedError(str(e)) from None
    ds = directions_for(field_kind, pg)
    if ds.identically_zero:
        raise SeedError(f"every direction is a {field_kind} direction at the seed")
    if not 0 <= branch < len(ds):
        raise SeedError(f"branch {branch} unavailable: {len(ds)} {field_kind} directions at the seed")

    theta = ds.angles[branch]
    d0 = pg.parameter_direction(theta)
    d0 = (1.0 if direction >= 0 else -1.0) * d0 / np.linalg.norm(d0)
    form = defining_form(field_kind, pg)
    current = _Sample(d0, theta, abs(float(bf.evaluate(form, theta))) / max(bf.scale(form), 1e-300),
                      1.0 if direction >= 0 else -1.0)

    points, angles, signs, residuals = [p.copy()], [theta], [current.sign], [current.residual]
    travelled = 0.0
    h = step
    min_step = step / 1024.0
    termination = "step_limit"

    for _ in range(max_steps):
        if travelled >= max_len:
            termination = "step_limit"
            break
        h_try = min(h, max_len - travelled)
        try:
            ref = (current.theta, current.direction)
            k1 = current.direction
            k2 = _sample_field(chart, field_kind, p + 0.5 * h_try * k1, *ref).direction
            k3 = _sample_field(chart, field_kind, p + 0.5 * h_try * k2, *ref).direction
            k4 = _sample_field(chart, field_kind, p + h_try * k3, *ref).direction
            p_new = p + (h_try / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
            nxt = _sample_field(chart, field_kind, p_new, *ref)
        except _FieldBreak as brk:
            if brk.reason == "root_collision" and h_try > min_step:
                h = h_try / 2.0
                continue
            termination = brk.reason
            break
        except GeometryError as e:
            logger.debug("trace stopped at %s: %s", tuple(p), e)
            termination = "singular_point"
            break

        travelled += float(np.linalg.norm(p_new - p))
        p, current = p_new, nxt
        points.append(p.copy())
        angles.append(current.theta)
        signs.append(current.sign)
        residuals.append(current.residual)
        h = min(step, 2.0 * h)

    logger.info("trace %s branch %d from %s: %d samples, %s", field_kind, branch, tuple(seed), len(points), termination)
    return FieldTrace(
        seed=(float(seed[0]), float(seed[1])),
        kind=field_kind,
        branch=branch,
        points=np.array(points),
        angles=np.array(angles),
        orientation=np.array(signs),
        residuals=np.array(residuals),
        termination=termination,
    )
