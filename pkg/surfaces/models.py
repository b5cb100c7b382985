from django.core.exceptions import ValidationError
from django.db import models

from .exceptions import GeometryError
from .surface_dsl import SurfaceChart, parse_surface


class Surface(models.Model):
    DIM_CHOICES = [(3, "R^3"), (4, "R^4"), (5, "R^5")]

    name = models.CharField(max_length=100, unique=True)
    ambient_dim = models.PositiveSmallIntegerField(choices=DIM_CHOICES, default=3)
    source = models.TextField(help_text="surface file text (name, ambient_dim, one component line per coordinate, u_range, v_range)")
    description = models.TextField(blank=True, default="")
    created_at = models.DateTimeField(auto_now_add=True)
    updated_at = models.DateTimeField(auto_now=True)

    class Meta:
        ordering = ["name"]

    def __str__(self):
        return f"{self.name} (R^{self.ambient_dim})"

    def chart(self) -> SurfaceChart:
        return parse_surface(self.source)

    def _checked_chart(self) -> SurfaceChart:
        try:
            return self.chart()
        except GeometryError as e:
            raise ValidationError({"source": f"{type(e).__name__}: {e}"})

    def clean(self):
        super().clean()
        self.ambient_dim = self._checked_chart().ambient_dim

    def save(self, *args, **kwargs):
        # ambient_dim always follows the source; an unparsable source is never stored
        self.ambient_dim = self._checked_chart().ambient_dim
        super().save(*args, **kwargs)
