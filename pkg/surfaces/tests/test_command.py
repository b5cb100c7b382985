import json
import tempfile
from io import StringIO
from pathlib import Path
from unittest import mock

import numpy as np
from django.core.management import CommandError, call_command
from django.test import SimpleTestCase, TestCase

from surfaces import __version__
from surfaces.models import Surface
from surfaces.oracle import DenseSearchResult, dense_theta_search

from .charts import SAMPLES

SPHERE_FILE = str(SAMPLES / "sphere.srf")
EXAMPLE_FILE = str(SAMPLES / "example5.srf")
CYLINDER_FILE = str(SAMPLES / "cylinder.srf")


def run(*args):
    out, err = StringIO(), StringIO()
    call_command("geodev", *args, stdout=out, stderr=err)
    return out.getvalue(), err.getvalue()


class PointCommandTests(SimpleTestCase):
    def test_sphere(self):
        out, _ = run("point", SPHERE_FILE, "--u", "0", "--v", "0", "--json")
        data = json.loads(out)
        self.assertEqual(data["schema"], "geodev-point/1")
        self.assertEqual(data["class"], "umbilic")
        self.assertTrue(data["extremal_frontal"]["identically_zero"])
        self.assertAlmostEqual(data["frontal_deviation_const"], -1.0 / 6.0, places=12)
        self.assertEqual(len(data["principal"]["angles"]), 0)
        # b1 = -X on the unit sphere, so its derivatives are the negated frame
        self.assertEqual(sorted(data["Db"]), ["11", "12", "13", "21", "22", "23"])
        np.testing.assert_allclose(data["Db"]["11"], [0.0, -1.0, 0.0], atol=1e-12)
        np.testing.assert_allclose(data["Db"]["21"], [0.0, 0.0, -1.0], atol=1e-12)
        np.testing.assert_allclose(data["Db"]["13"], [0.0, 0.0, 0.0], atol=1e-12)

    def test_example_chart(self):
        out, _ = run("point", EXAMPLE_FILE, "--u", "0", "--v", "0", "--theta", "0.39269908169872414")
        data = json.loads(out)
        self.assertEqual(data["class"], "semiumbilic")
        self.assertEqual(len(data["extremal_lateral_angles"]), 4)
        self.assertAlmostEqual(data["deviation"][0]["lateral"], 1.0 / 48.0, places=12)

    def test_output_is_deterministic(self):
        args = ("point", EXAMPLE_FILE, "--u", "0.3", "--v", "-0.2", "--theta", "1.0", "--theta", "0.2")
        self.assertEqual(run(*args)[0], run(*args)[0])

    def test_missing_file(self):
        with self.assertRaises(CommandError) as ctx:
            run("point", "/nonexistent/surface.srf", "--u", "0", "--v", "0")
        self.assertEqual(ctx.exception.returncode, 1)
        self.assertIn("cannot read surface file", str(ctx.exception))

    def test_banner(self):
        _, err = run("point", SPHERE_FILE, "--u", "0", "--v", "0", "--banner")
        self.assertIn(f"geodev {__version__}", err)


class VerifyCommandTests(SimpleTestCase):
    def test_passes(self):
        out, _ = run("verify", EXAMPLE_FILE, "--u", "0.3", "--v", "0.2")
        block = json.loads(out)["verification"]
        self.assertTrue(block["passed"])
        self.assertTrue(block["jets"]["passed"])

    def test_failure_exit_code(self):
        with mock.patch("surfaces.reports.taylor_remainder_slope", return_value=3.0):
            with self.assertRaises(CommandError) as ctx:
                run("verify", EXAMPLE_FILE, "--u", "0.3", "--v", "0.2")
        self.assertEqual(ctx.exception.returncode, 2)

    def test_tol_verify_loosens_the_angle_match(self):
        def off_by_1e5(f, mode="zeros", samples=20000):
            found = dense_theta_search(f, mode, samples)
            return DenseSearchResult(tuple(a + 1e-5 for a in found.angles), found.constant)

        with mock.patch("surfaces.reports.dense_theta_search", side_effect=off_by_1e5):
            with self.assertRaises(CommandError) as ctx:
                run("verify", EXAMPLE_FILE, "--u", "0.3", "--v", "0.2")
            self.assertEqual(ctx.exception.returncode, 2)
            out, _ = run("verify", EXAMPLE_FILE, "--u", "0.3", "--v", "0.2", "--tol-verify", "1e-4")
        block = json.loads(out)["verification"]
        self.assertTrue(block["passed"])
        self.assertGreater(block["extremal_frontal"]["max_gap"], 1e-6)


class FieldCommandTests(SimpleTestCase):
    def test_sphere_is_degenerate(self):
        out, _ = run("field", SPHERE_FILE, "--kind", "extremal-frontal", "--grid", "5x5", "--seed-grid", "2x2", "--json")
        summary = json.loads(out)
        self.assertEqual(summary["counts"], {"-1": 25})
        self.assertEqual(summary["traces"], 0)

    def test_writes_svg_and_csv(self):
        with tempfile.TemporaryDirectory() as tmp:
            svg, csv_path = Path(tmp) / "field.svg", Path(tmp) / "grid.csv"
            out, _ = run(
                "field", EXAMPLE_FILE, "--kind", "extremal-frontal",
                "--grid", "24x24", "--seed-grid", "2x2", "--step", "0.1", "--max-len", "0.4",
                "--svg", str(svg), "--csv", str(csv_path),
            )
            self.assertIn("field lines", out)
            body = svg.read_text(encoding="utf-8")
            self.assertIn('class="discriminant"', body)
            self.assertIn("field-line", body)
            lines = csv_path.read_text(encoding="utf-8").splitlines()
            self.assertEqual(lines[0], "# schema: geodev-grid/1; kind: extremal-frontal")
            self.assertEqual(lines[1], "i,j,u,v,count,class,angles")
            self.assertEqual(len(lines), 2 + 24 * 24)

    def test_kind_dimension_mismatch(self):
        with self.assertRaises(CommandError) as ctx:
            run("field", EXAMPLE_FILE, "--kind", "principal", "--grid", "4x4")
        self.assertEqual(ctx.exception.returncode, 1)
        with self.assertRaises(CommandError):
            run("field", EXAMPLE_FILE, "--kind", "extremal-frontal", "--grid", "ten")


class TraceCommandTests(SimpleTestCase):
    def test_trace_json(self):
        out, _ = run("trace", CYLINDER_FILE, "--kind", "principal", "--u", "0", "--v", "0", "--step", "0.1", "--max-len", "0.5")
        data = json.loads(out)
        self.assertEqual(data["schema"], "geodev-trace/1")
        self.assertEqual(data["termination"], "step_limit")
        self.assertTrue(data["tangent_ok"])
        self.assertAlmostEqual(data["points"][-1][0], 0.5, places=9)

    def test_bad_branch(self):
        with self.assertRaises(CommandError) as ctx:
            run("trace", CYLINDER_FILE, "--kind", "principal", "--u", "0", "--v", "0", "--branch", "7")
        self.assertEqual(ctx.exception.returncode, 1)


class LoadSurfaceCommandTests(TestCase):
    def test_store_and_replace(self):
        out = StringIO()
        call_command("load_surface", CYLINDER_FILE, stdout=out)
        self.assertIn("Stored cylinder (R^3)", out.getvalue())
        with self.assertRaises(CommandError):
            call_command("load_surface", CYLINDER_FILE, stdout=StringIO())
        out = StringIO()
        call_command("load_surface", CYLINDER_FILE, "--replace", "--description", "unit cylinder", stdout=out)
        self.assertIn("Replaced", out.getvalue())
        self.assertEqual(Surface.objects.get(name="cylinder").description, "unit cylinder")
