from django.contrib import admin
from django.urls import path, include
from django.http import HttpResponse
from django.views.generic.base import RedirectView

def ping(_request): return HttpResponse("pong")

urlpatterns = [
    path("admin/", admin.site.urls),
    path("surfaces/", include(("surfaces.urls", "surfaces"), namespace="surfaces")),
    path("", RedirectView.as_view(pattern_name="surfaces:surface_list", permanent=False), name="root"),
    path("ping/", ping),
]
