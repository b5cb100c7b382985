# surfaces/urls.py
from django.urls import path
from . import views

app_name = "surfaces"

urlpatterns = [
    path("", views.surface_list, name="surface_list"),
    path("<int:pk>/point/", views.point_detail, name="point_detail"),
    path("<int:pk>/field.svg", views.field_svg, name="field_svg"),
    path("<int:pk>/grid.csv", views.grid_csv_export, name="grid_csv"),
]
