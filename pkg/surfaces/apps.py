from django.apps import AppConfig

class SurfacesConfig(AppConfig):
    default_auto_field = "django.db.models.BigAutoField"
    name = "surfaces"
    verbose_name = "Surfaces"
