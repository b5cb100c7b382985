# surfaces/views.py
from __future__ import annotations

import logging

from django.http import HttpRequest, HttpResponse, JsonResponse
from django.shortcuts import get_object_or_404
from django.views.decorators.http import require_GET

from .exceptions import GeometryError
from .fields import parse_grid, scan_grid
from .models import Surface
from .reports import field_output, point_report
from .utils.serialization import dump_json, grid_csv

logger = logging.getLogger(__name__)

MAX_GRID_NODES = 200 * 200


def _bad_request(e: Exception) -> JsonResponse:
    return JsonResponse({"error": type(e).__name__, "detail": str(e)}, status=400)


def _float_param(request: HttpRequest, key: str, default=None) -> float:
    raw = request.GET.get(key)
    if raw is None or raw == "":
        if default is None:
            raise ValueError(f"missing parameter {key!r}")
        return default
    try:
        return float(raw)
    except ValueError:
        raise ValueError(f"parameter {key!r} must be a number, got {raw!r}") from None


def _thetas(request: HttpRequest) -> list[float]:
    out = []
    for raw in request.GET.getlist("theta"):
        for part in raw.split(","):
            if part.strip():
                try:
                    out.append(float(part))
                except ValueError:
                    raise ValueError(f"theta must be a number, got {part!r}") from None
    return out


def _grid_param(request: HttpRequest, key: str, default: str) -> tuple[int, int]:
    nu, nv = parse_grid(request.GET.get(key) or default)
    if nu * nv > MAX_GRID_NODES:
        raise ValueError(f"{key} {nu}x{nv} exceeds {MAX_GRID_NODES} nodes")
    return nu, nv


# ===== List =====
@require_GET
def surface_list(request: HttpRequest):
    rows = [
        {"id": s.pk, "name": s.name, "ambient_dim": s.ambient_dim, "description": s.description}
        for s in Surface.objects.all()
    ]
    return JsonResponse({"surfaces": rows})


# ===== Point report =====
@require_GET
def point_detail(request: HttpRequest, pk: int):
    surface = get_object_or_404(Surface, pk=pk)
    try:
        u = _float_param(request, "u")
        v = _float_param(request, "v")
        report = point_report(surface.chart(), u, v, thetas=_thetas(request))
    except (GeometryError, ValueError) as e:
        logger.debug("point report for %s failed: %s", surface.name, e)
        return _bad_request(e)
    return HttpResponse(dump_json(report), content_type="application/json")


# ===== Field SVG / grid CSV =====
@require_GET
def field_svg(request: HttpRequest, pk: int):
    surface = get_object_or_404(Surface, pk=pk)
    try:
        out = field_output(
            surface.chart(),
            request.GET.get("kind", "extremal-frontal"),
            grid=_grid_param(request, "grid", "40x40"),
            seed_grid=_grid_param(request, "seed_grid", "3x3"),
        )
    except (GeometryError, ValueError) as e:
        return _bad_request(e)
    return HttpResponse(out.svg, content_type="image/svg+xml; charset=UTF-8")


@require_GET
def grid_csv_export(request: HttpRequest, pk: int):
    surface = get_object_or_404(Surface, pk=pk)
    kind = request.GET.get("kind", "extremal-frontal")
    try:
        scan = scan_grid(surface.chart(), kind, _grid_param(request, "grid", "40x40"))
    except (GeometryError, ValueError) as e:
        return _bad_request(e)
    resp = HttpResponse(grid_csv(scan), content_type="text/csv; charset=UTF-8")
    resp["Content-Disposition"] = f'attachment; filename="{surface.name}_{kind}.csv"'
    return resp
