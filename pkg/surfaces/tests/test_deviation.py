import math

import numpy as np
from django.test import SimpleTestCase

from surfaces.deviation import (
    deviation_report,
    frontal_deviation,
    geodesic_taylor,
    lateral_deviation,
    normal_curvature_r3,
    normal_torsion,
    retard,
)
from surfaces.exceptions import DimensionError, TorsionUndefined
from surfaces.frames import build_point_geometry, eta
from surfaces.oracle import kappa_derivative_along_geodesic

from .charts import EXAMPLE5, MONGE4, MONGE4_C, SADDLE, SPHERE, TORUS_AB4, quadric, transform_ambient


class DeviationValueTests(SimpleTestCase):
    def test_sphere_is_isotropic(self):
        pg = build_point_geometry(SPHERE, 0.0, 0.0)
        for theta in (0.0, 0.5, 1.9, 3.0):
            rep = deviation_report(pg, theta)
            self.assertAlmostEqual(rep.frontal, -1.0 / 6.0, places=13)
            self.assertAlmostEqual(rep.lateral, 0.0, places=13)
            self.assertAlmostEqual(rep.kappa, 1.0, places=13)
            self.assertAlmostEqual(rep.kappa_prime, 0.0, places=12)
            self.assertIsNone(rep.tau)
            self.assertFalse(rep.degenerate)

    def test_lateral_on_example_chart(self):
        pg = build_point_geometry(EXAMPLE5, 0.0, 0.0)
        self.assertAlmostEqual(lateral_deviation(pg, math.pi / 8), 1.0 / 48.0, places=14)
        for theta in (0.1, 0.9, 2.4):
            self.assertAlmostEqual(lateral_deviation(pg, theta), math.sin(4 * theta) / 48.0, places=14)
        rep = deviation_report(pg, math.pi / 8)
        self.assertAlmostEqual(rep.proj_curvature, math.sqrt(3.0 / 8.0), places=13)
        self.assertAlmostEqual(rep.proj_torsion, 0.125 / math.sqrt(3.0 / 8.0), places=13)
        self.assertEqual(rep.as_dict()["lateral"], rep.lateral)

    def test_lateral_is_quarter_slope_of_frontal(self):
        pg = build_point_geometry(MONGE4_C, 0.2, -0.1)
        h = 1e-6
        for theta in (0.3, 1.2, 2.7):
            slope = (frontal_deviation(pg, theta + h) - frontal_deviation(pg, theta - h)) / (2 * h)
            self.assertAlmostEqual(lateral_deviation(pg, theta), slope / 4.0, delta=1e-8)

    def test_retard_is_frontal_times_cube(self):
        pg = build_point_geometry(SPHERE, 0.2, 0.3)
        self.assertAlmostEqual(retard(pg, 0.4, 0.1), -1.0 / 6.0 * 1e-3, places=14)

    def test_euler_formula(self):
        pg = build_point_geometry(quadric(2.0, 1.0), 0.0, 0.0)
        for theta in (0.0, 0.6, math.pi / 2, 2.2):
            expected = 2.0 * math.cos(theta) ** 2 + math.sin(theta) ** 2
            self.assertAlmostEqual(normal_curvature_r3(pg, theta), expected, places=13)
        with self.assertRaises(DimensionError):
            normal_curvature_r3(build_point_geometry(MONGE4, 0.0, 0.0), 0.0)


class DegenerateDirectionTests(SimpleTestCase):
    def test_asymptotic_direction_of_saddle(self):
        pg = build_point_geometry(SADDLE, 0.0, 0.0)
        rep = deviation_report(pg, math.pi / 4)
        self.assertTrue(rep.degenerate)
        self.assertEqual(rep.kappa_prime, 0.0)
        self.assertIsNone(rep.proj_torsion)
        self.assertAlmostEqual(rep.frontal, 0.0, places=14)

    def test_torsion_needs_r4(self):
        with self.assertRaises(TorsionUndefined):
            normal_torsion(build_point_geometry(SPHERE, 0.0, 0.0), 0.3)
        with self.assertRaises(TorsionUndefined):
            normal_torsion(build_point_geometry(EXAMPLE5, 0.0, 0.0), 0.3)
        with self.assertRaises(TorsionUndefined):
            deviation_report(build_point_geometry(SPHERE, 0.0, 0.0), 0.3, require_tau=True)

    def test_torsion_in_r4(self):
        pg = build_point_geometry(MONGE4, 0.1, 0.05)
        rep = deviation_report(pg, 0.7, require_tau=True)
        self.assertAlmostEqual(rep.tau, normal_torsion(pg, 0.7), places=14)
        # parallel second fundamental form: the normal sections are plane curves
        flat = deviation_report(build_point_geometry(TORUS_AB4, 0.4, 1.0), 0.7)
        self.assertAlmostEqual(flat.tau, 0.0, places=12)

    def test_torsion_sign_follows_orientation(self):
        # swapping the two normal coordinates reverses the ambient orientation
        flipped = transform_ambient(MONGE4, np.eye(4)[[0, 1, 3, 2]])
        pg, pg_flipped = build_point_geometry(MONGE4, 0.1, -0.1), build_point_geometry(flipped, 0.1, -0.1)
        taus = []
        for theta in (0.3, 1.1, 2.0):
            rep = deviation_report(pg, theta, require_tau=True)
            mirrored = deviation_report(pg_flipped, theta, require_tau=True)
            self.assertAlmostEqual(mirrored.tau, -rep.tau, delta=1e-9 * max(1.0, abs(rep.tau)))
            self.assertAlmostEqual(mirrored.frontal, rep.frontal, places=10)
            taus.append(abs(rep.tau))
        self.assertGreater(max(taus), 1e-3)


class GeodesicTaylorTests(SimpleTestCase):
    def test_low_order_coefficients(self):
        pg = build_point_geometry(MONGE4, -0.2, 0.1)
        model = geodesic_taylor(pg, 1.1)
        np.testing.assert_allclose(model.c0, pg.m)
        np.testing.assert_allclose(model.c1, pg.tangent(1.1))
        np.testing.assert_allclose(model.c2, eta(pg, 1.1) / 2)
        np.testing.assert_allclose(model.at(0.0), pg.m)
        self.assertEqual(model.at([0.0, 0.1]).shape, (2, 4))

    def test_great_circle(self):
        pg = build_point_geometry(SPHERE, 0.0, 0.0)
        model = geodesic_taylor(pg, 0.7)
        v = pg.tangent(0.7)
        np.testing.assert_allclose(model.c3, -v / 6.0, atol=1e-13)
        t = 1e-2
        exact = pg.m * math.cos(t) + v * math.sin(t)
        np.testing.assert_allclose(model.at(t), exact, atol=1e-9)

    def test_kappa_prime_matches_geodesic(self):
        for chart, (u, v), theta in ((MONGE4, (0.1, 0.05), 0.4), (MONGE4_C, (-0.1, 0.2), 2.0)):
            pg = build_point_geometry(chart, u, v)
            rep = deviation_report(pg, theta)
            self.assertAlmostEqual(rep.kappa_prime, kappa_derivative_along_geodesic(chart, u, v, theta), delta=1e-4)
