# surfaces/admin.py
from django.contrib import admin, messages

from .exceptions import GeometryError
from .frames import build_point_geometry
from .models import Surface


# ---------- Surface ----------
def validate_surfaces(modeladmin, request, queryset):
    """
    Parse every selected surface and evaluate it at the center of its domain.
    """
    ok = 0
    for s in queryset:
        try:
            chart = s.chart()
            (u0, u1), (v0, v1) = chart.u_range, chart.v_range
            build_point_geometry(chart, 0.5 * (u0 + u1), 0.5 * (v0 + v1))
            ok += 1
        except GeometryError as e:
            modeladmin.message_user(request, f"{s.name}: {type(e).__name__}: {e}", level=messages.ERROR)
    if ok:
        modeladmin.message_user(request, f"{ok} surface(s) valid", level=messages.SUCCESS)
validate_surfaces.short_description = "Validate selected surfaces"


@admin.register(Surface)
class SurfaceAdmin(admin.ModelAdmin):
    list_display = ("name", "ambient_dim", "updated_at")
    list_filter = ("ambient_dim",)
    search_fields = ("name", "description")
    readonly_fields = ("ambient_dim", "created_at", "updated_at")
    ordering = ("name",)
    actions = [validate_surfaces]
