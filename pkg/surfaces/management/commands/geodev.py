# surfaces/management/commands/geodev.py
import json
import logging
import math
from pathlib import Path

from django.core.management.base import BaseCommand, CommandError

from surfaces import __version__, conf
from surfaces.exceptions import GeometryError
from surfaces.fields import parse_grid
from surfaces.reports import field_output, point_report, trace_report
from surfaces.surface_dsl import load_surface
from surfaces.utils.serialization import dump_json, plain

logger = logging.getLogger("surfaces.cli")

INPUT_ERROR = 1
VERIFY_FAILED = 2


class Command(BaseCommand):
    help = "Third-order geometry of a parametric surface: point reports, field lines, grid scans, oracle checks"

    def add_arguments(self, parser):
        # Python 3.10 argparse prefix-matches subcommand flags such as --v
        # against Django's --version/--verbosity on the top-level parser.
        parser.allow_abbrev = False
        sub = parser.add_subparsers(dest="action", required=True)

        point = sub.add_parser("point", help="point report as JSON")
        verify = sub.add_parser("verify", help="point report plus oracle cross-checks; exit 2 on failure")
        for p in (point, verify):
            p.add_argument("surface_file")
            p.add_argument("--u", type=float, required=True)
            p.add_argument("--v", type=float, required=True)
            p.add_argument("--theta", type=float, action="append", default=[])
            p.add_argument("--json", action="store_true", help="JSON output (the default)")
        point.add_argument("--verify", action="store_true")

        field = sub.add_parser("field", help="grid scan, field lines and discriminant curve")
        field.add_argument("surface_file")
        field.add_argument("--kind", required=True)
        field.add_argument("--grid", default="40x40")
        field.add_argument("--seed-grid", default="3x3")
        field.add_argument("--step", type=float)
        field.add_argument("--max-len", type=float)
        field.add_argument("--svg")
        field.add_argument("--csv")
        field.add_argument("--json", action="store_true", help="print a JSON summary")

        trace = sub.add_parser("trace", help="one integral line of a direction field")
        trace.add_argument("surface_file")
        trace.add_argument("--kind", required=True)
        trace.add_argument("--u", type=float, required=True)
        trace.add_argument("--v", type=float, required=True)
        trace.add_argument("--branch", type=int, default=0)
        trace.add_argument("--step", type=float)
        trace.add_argument("--max-len", type=float)
        trace.add_argument("--reverse", action="store_true")
        trace.add_argument("--json", action="store_true", help="JSON output (the default)")

        for p in (point, verify, field, trace):
            p.add_argument("--tol-root", type=float, help="relative residual a polynomial root must reach")
            p.add_argument("--tol-verify", type=float, help="residual and oracle angle-match tolerance")
            p.add_argument("--banner", action="store_true", help="print the version to stderr (and into the SVG)")

    def handle(self, *args, **opts):
        action = opts["action"]
        if opts.get("banner"):
            self.stderr.write(f"geodev {__version__}")
        logger.info("geodev %s %s", action, opts["surface_file"])

        try:
            chart = load_surface(opts["surface_file"])
        except OSError as e:
            raise CommandError(f"cannot read surface file {opts['surface_file']}: {e}", returncode=INPUT_ERROR)
        except GeometryError as e:
            raise CommandError(f"{type(e).__name__}: {e}", returncode=INPUT_ERROR)

        try:
            tol_verify = opts.get("tol_verify")
            with conf.override(ROOT_TOL=opts.get("tol_root"), VERIFY_TOL=tol_verify, ORACLE_ANGLE_TOL=tol_verify):
                if action in ("point", "verify"):
                    self._point(chart, opts, verify=action == "verify" or opts.get("verify"))
                elif action == "field":
                    self._field(chart, opts)
                else:
                    self._trace(chart, opts)
        except OSError as e:
            raise CommandError(f"cannot write output: {e}", returncode=INPUT_ERROR)
        except ValueError as e:
            # GeometryError is a ValueError
            raise CommandError(f"{type(e).__name__}: {e}", returncode=INPUT_ERROR)
        logger.info("geodev %s done", action)

    # ---------- point / verify ----------
    def _point(self, chart, opts, verify):
        report = point_report(chart, opts["u"], opts["v"], thetas=opts["theta"], verify=verify)
        self.stdout.write(dump_json(report), ending="")
        if verify and not report["verification"]["passed"]:
            failed = sorted(k for k, block in report["verification"].items() if isinstance(block, dict) and not block["passed"])
            self.stderr.write(self.style.ERROR(f"verification failed: {', '.join(failed)}"))
            raise CommandError("verification failed", returncode=VERIFY_FAILED)

    # ---------- field ----------
    def _field(self, chart, opts):
        out = field_output(
            chart,
            opts["kind"],
            grid=parse_grid(opts["grid"]),
            seed_grid=parse_grid(opts["seed_grid"]),
            step=opts.get("step"),
            max_len=opts.get("max_len"),
            banner=f"geodev {__version__}" if opts.get("banner") else "",
        )
        if opts.get("svg"):
            Path(opts["svg"]).write_text(out.svg, encoding="utf-8")
        if opts.get("csv"):
            Path(opts["csv"]).write_text(out.csv, encoding="utf-8")

        if opts.get("json"):
            counts = {}
            for c in out.scan.counts.ravel():
                counts[str(int(c))] = counts.get(str(int(c)), 0) + 1
            summary = {
                "kind": out.scan.kind,
                "grid": list(out.scan.resolution),
                "counts": counts,
                "traces": len(out.traces),
                "discriminant_polylines": 0 if out.curve is None else len(out.curve),
            }
            self.stdout.write(json.dumps(plain(summary), sort_keys=True))
        elif not opts.get("svg") and not opts.get("csv"):
            self.stdout.write(out.svg, ending="")
        else:
            self.stdout.write(self.style.SUCCESS(f"{opts['kind']}: {len(out.traces)} field lines"))

    # ---------- trace ----------
    def _trace(self, chart, opts):
        (u0, u1), (v0, v1) = chart.u_range, chart.v_range
        diag = math.hypot(u1 - u0, v1 - v0)
        report = trace_report(
            chart,
            opts["kind"],
            (opts["u"], opts["v"]),
            opts["branch"],
            opts.get("step") or diag / 100.0,
            opts.get("max_len") or diag / 4.0,
            direction=-1 if opts["reverse"] else 1,
        )
        self.stdout.write(dump_json(report), ending="")
