# surfaces/management/commands/load_surface.py
from pathlib import Path

from django.core.management.base import BaseCommand, CommandError

from surfaces.exceptions import GeometryError
from surfaces.models import Surface
from surfaces.surface_dsl import parse_surface


class Command(BaseCommand):
    help = "Store a surface file in the database"

    def add_arguments(self, parser):
        parser.add_argument("path")
        parser.add_argument("--replace", action="store_true", help="overwrite a stored surface with the same name")
        parser.add_argument("--description", default="")

    def handle(self, *args, **opts):
        try:
            text = Path(opts["path"]).read_text(encoding="utf-8")
        except OSError as e:
            raise CommandError(f"cannot read surface file {opts['path']}: {e}", returncode=1)
        try:
            chart = parse_surface(text)
        except GeometryError as e:
            self.stderr.write(self.style.ERROR(f"{opts['path']}: {e}"))
            raise CommandError(f"{type(e).__name__}: {e}", returncode=1)

        existing = Surface.objects.filter(name=chart.name).first()
        if existing and not opts["replace"]:
            raise CommandError(f"surface {chart.name!r} already stored (use --replace)", returncode=1)

        surface = existing or Surface(name=chart.name)
        surface.source = text
        surface.description = opts["description"] or surface.description
        surface.save()
        self.stdout.write(self.style.SUCCESS(f"{'Replaced' if existing else 'Stored'} {surface}"))
