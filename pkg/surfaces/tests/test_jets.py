import math

import numpy as np
from django.test import SimpleTestCase

from surfaces.exceptions import DivisionByZeroValue, DomainError
from surfaces.jets import INDICES, Jet3, jet_arith, jet_constant, jet_elem, jet_variable, stack


class JetArithmeticTests(SimpleTestCase):
    def test_variable_seeds_first_partial(self):
        u = jet_variable("u", 0.3)
        self.assertEqual(u.value, 0.3)
        self.assertEqual(u.partial(1, 0), 1.0)
        self.assertEqual(u.partial(0, 1), 0.0)
        self.assertEqual(len(INDICES), 10)

    def test_product_rule_up_to_third_order(self):
        u, v = jet_variable("u", 0.7), jet_variable("v", -0.4)
        f = u * u * v  # u²v
        self.assertAlmostEqual(float(f.value), 0.49 * -0.4)
        self.assertAlmostEqual(float(f.partial(1, 0)), 2 * 0.7 * -0.4)
        self.assertAlmostEqual(float(f.partial(1, 1)), 2 * 0.7)
        self.assertAlmostEqual(float(f.partial(2, 1)), 2.0)
        self.assertAlmostEqual(float(f.partial(3, 0)), 0.0)

    def test_sin_partials(self):
        x0 = 0.9
        s = jet_variable("u", x0).sin()
        expected = [math.sin(x0), math.cos(x0), -math.sin(x0), -math.cos(x0)]
        got = [float(s.partial(k, 0)) for k in range(4)]
        np.testing.assert_allclose(got, expected, atol=1e-14)

    def test_mixed_partial_through_composition(self):
        u, v = jet_variable("u", 0.5), jet_variable("v", 0.4)
        f = (u * v).sin()
        # ∂²/∂u∂v sin(uv) = cos(uv) − uv sin(uv)
        self.assertAlmostEqual(float(f.partial(1, 1)), math.cos(0.2) - 0.2 * math.sin(0.2), places=13)
        # ∂³/∂u²∂v = −3v sin(uv) − u v² cos(uv)
        self.assertAlmostEqual(
            float(f.partial(2, 1)), -3 * 0.4 * math.sin(0.2) - 0.5 * 0.16 * math.cos(0.2), places=13
        )

    def test_exp_of_sum(self):
        f = (jet_variable("u", 0.1) + jet_variable("v", 0.2)).exp()
        for idx in INDICES:
            self.assertAlmostEqual(float(f.partial(*idx)), math.exp(0.3), places=13)

    def test_quotient_and_reciprocal(self):
        u = jet_variable("u", 2.0)
        f = 1.0 / u
        self.assertAlmostEqual(float(f.partial(0, 0)), 0.5)
        self.assertAlmostEqual(float(f.partial(1, 0)), -0.25)
        self.assertAlmostEqual(float(f.partial(2, 0)), 0.25)
        self.assertAlmostEqual(float(f.partial(3, 0)), -6 / 16)
        self.assertTrue((u / u).is_close(jet_constant(1.0)))

    def test_power_and_sqrt_agree(self):
        u = jet_variable("u", 1.7)
        self.assertTrue(u.sqrt().is_close(u.power(0.5)))
        self.assertTrue((u**3).is_close(u * u * u))

    def test_square_at_zero(self):
        f = jet_variable("u", 0.0) ** 2
        self.assertEqual(float(f.partial(2, 0)), 2.0)
        self.assertEqual(float(f.partial(3, 0)), 0.0)

    def test_domain_errors(self):
        zero = jet_variable("u", 0.0)
        with self.assertRaises(DivisionByZeroValue):
            zero.reciprocal()
        with self.assertRaises(DivisionByZeroValue):
            jet_variable("u", 1.0) / 0.0
        with self.assertRaises(DomainError):
            jet_variable("u", -1.0).log()
        with self.assertRaises(DomainError):
            zero.sqrt()
        with self.assertRaises(DomainError):
            jet_variable("u", -2.0).power(0.5)
        with self.assertRaises(DivisionByZeroValue):
            zero.power(-1)


class JetIdentityTests(SimpleTestCase):
    def setUp(self):
        u, v = jet_variable("u", 0.35), jet_variable("v", -0.6)
        self.u, self.v = u, v
        self.a = u.sin() * v + 2.0
        self.b = (u - v).exp()
        self.c = u * u - 3.0 * v

    def test_ring_axioms(self):
        a, b, c = self.a, self.b, self.c
        zero, one = jet_constant(0.0), jet_constant(1.0)
        self.assertTrue((a + b).is_close(b + a))
        self.assertTrue((a * b).is_close(b * a))
        self.assertTrue(((a + b) + c).is_close(a + (b + c)))
        self.assertTrue(((a * b) * c).is_close(a * (b * c)))
        self.assertTrue((a * (b + c)).is_close(a * b + a * c))
        self.assertTrue((a + zero).is_close(a))
        self.assertTrue((a * one).is_close(a))
        self.assertTrue((a - a).is_close(zero))
        self.assertTrue((a * a.reciprocal()).is_close(one))

    def test_pythagorean_identity(self):
        for x in (self.u, self.a, self.c):
            s, co = x.sin(), x.cos()
            self.assertTrue((s * s + co * co).is_close(jet_constant(1.0)))

    def test_chain_rule(self):
        u, v = self.u, self.v
        self.assertTrue((2.0 * u).sin().is_close(2.0 * u.sin() * u.cos()))
        self.assertTrue(self.b.log().is_close(u - v))
        self.assertTrue(self.a.log().exp().is_close(self.a))
        self.assertTrue((self.a * self.a).sqrt().is_close(self.a))
        # d/du sin(c) = cos(c) ∂c/∂u
        self.assertAlmostEqual(
            float(self.c.sin().partial(1, 0)), math.cos(float(self.c.value)) * float(self.c.partial(1, 0)), places=13
        )


class VectorJetTests(SimpleTestCase):
    def test_scalar_times_vector_broadcasts_over_components(self):
        u, v = jet_variable("u", 0.2), jet_variable("v", 0.3)
        X = stack([u, v, u * v])
        scaled = u * X
        self.assertEqual(scaled.shape, (3,))
        # third component u²v
        self.assertAlmostEqual(float(scaled.partial(2, 1)[2]), 2.0)
        self.assertAlmostEqual(float(scaled.partial(1, 0)[1]), 0.3)

    def test_dot_and_norm(self):
        u, v = jet_variable("u", 0.6), jet_variable("v", 0.8)
        X = Jet3.stack([u, v])
        n = X.norm()
        self.assertAlmostEqual(float(n.value), 1.0)
        # ∂/∂u |(u, v)| = u / r
        self.assertAlmostEqual(float(n.partial(1, 0)), 0.6)

    def test_shift_differentiates(self):
        u = jet_variable("u", 0.4)
        f = u * u * u
        du = f.d_u()
        self.assertAlmostEqual(float(du.value), 3 * 0.16)
        self.assertAlmostEqual(float(du.partial(1, 0)), 6 * 0.4)
        self.assertEqual(float(du.partial(3, 0)), 0.0)

    def test_jets_are_read_only(self):
        j = jet_variable("v", 1.0)
        with self.assertRaises(ValueError):
            j.coeffs[0] = 5.0


class OperationEntryPointTests(SimpleTestCase):
    def test_jet_arith_and_elem(self):
        a, b = jet_variable("u", 1.5), jet_constant(2.0)
        self.assertTrue(jet_arith("add", a, b).is_close(a + 2.0))
        self.assertTrue(jet_arith("neg", a).is_close(-a))
        self.assertTrue(jet_elem("pow_const", a, 2).is_close(a * a))
        self.assertTrue(jet_elem("cos", a).is_close(a.cos()))
        with self.assertRaises(ValueError):
            jet_arith("mod", a, b)
        with self.assertRaises(ValueError):
            jet_elem("tan", a)
        with self.assertRaises(ValueError):
            jet_arith("mul", a)
