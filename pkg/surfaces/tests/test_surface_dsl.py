import math

import numpy as np
from django.test import SimpleTestCase

from surfaces.exceptions import DimensionError, DomainError, ParseError, UnknownIdentifier
from surfaces.surface_dsl import (
    ExprNode,
    SurfaceChart,
    eval_chart,
    evaluate_value,
    load_surface,
    parse_expression,
    parse_surface,
    pretty_print,
)

from .charts import EXAMPLE5, SAMPLES

EXAMPLE_TEXT = """\
name        = "example-r5"
ambient_dim = 5
component   = "u^2*v^2"
component   = "u+v"
component   = "u-v"
component   = "(u^2+v^2)/2"
component   = "(u^2-v^2)/2"
u_range     = -1.5 1.5
v_range     = -1.5 1.5
"""


class ExpressionParserTests(SimpleTestCase):
    def test_product_of_powers(self):
        u, v = ExprNode.variable("u"), ExprNode.variable("v")
        expected = ExprNode.binary("mul", ExprNode.power(u, 2), ExprNode.power(v, 2))
        self.assertEqual(parse_expression("u^2*v^2"), expected)

    def test_caret_binds_tighter_than_unary_minus(self):
        u = ExprNode.variable("u")
        self.assertEqual(parse_expression("-u^2"), ExprNode.unary("neg", ExprNode.power(u, 2)))
        self.assertEqual(float(evaluate_value(parse_expression("-u^2"), 3.0, 0.0)), -9.0)

    def test_left_associative_and_precedence(self):
        self.assertEqual(float(evaluate_value(parse_expression("8-3-2"), 0, 0)), 3.0)
        self.assertEqual(float(evaluate_value(parse_expression("8/4/2"), 0, 0)), 1.0)
        self.assertEqual(float(evaluate_value(parse_expression("1+2*3"), 0, 0)), 7.0)
        self.assertEqual(float(evaluate_value(parse_expression("2^-1"), 0, 0)), 0.5)

    def test_constants_and_functions(self):
        node = parse_expression("sin(pi/2) + e^0 + sqrt(u)*exp(v) + log(e)")
        self.assertAlmostEqual(float(evaluate_value(node, 4.0, 0.0)), 1 + 1 + 2 + 1)

    def test_pretty_print_round_trip(self):
        for text in ("u^2*v^2", "-u^2", "(u+v)/(1-u*v)", "sin(u)*cos(v)^3", "2^-1*u", "pi*e-u^0.5", "1e-3*v"):
            tree = parse_expression(text)
            self.assertEqual(parse_expression(pretty_print(tree)), tree, text)

    def test_unknown_identifier_reports_column(self):
        with self.assertRaises(UnknownIdentifier) as ctx:
            parse_expression("u + foo")
        self.assertEqual(ctx.exception.column, 5)

    def test_syntax_errors(self):
        for bad in ("(u+1", "u+*v", "u^v", "", "3 $ 4", "sin u"):
            with self.assertRaises(ParseError, msg=bad):
                parse_expression(bad)

    def test_exponent_must_fold_to_a_finite_number(self):
        for bad in ("u^(1/0)", "u^(0/0)", "u^(2^2000)", "u*1e999"):
            with self.assertRaises(ParseError, msg=bad):
                parse_expression(bad)
        with self.assertRaises(ParseError) as ctx:
            parse_expression("u^(1/0)")
        self.assertEqual(ctx.exception.column, 2)


class SurfaceFileTests(SimpleTestCase):
    def test_example_file(self):
        chart = parse_surface(EXAMPLE_TEXT)
        self.assertEqual(chart.name, "example-r5")
        self.assertEqual(chart.ambient_dim, 5)
        self.assertEqual(len(chart.components), 5)
        self.assertEqual(chart.u_range, (-1.5, 1.5))
        u, v = ExprNode.variable("u"), ExprNode.variable("v")
        self.assertEqual(chart.components[0], ExprNode.binary("mul", ExprNode.power(u, 2), ExprNode.power(v, 2)))

    def test_to_text_reparses(self):
        chart = parse_surface(EXAMPLE_TEXT)
        again = parse_surface(chart.to_text())
        self.assertEqual(again, chart)

    def test_comments_and_quoted_hash(self):
        chart = parse_surface('# header\nname = "a#b"  # trailing\nambient_dim = 3\n'
                              'component = "u"\ncomponent = "v"\ncomponent = "u*v"\n')
        self.assertEqual(chart.name, "a#b")
        self.assertEqual(chart.domain, (-1.0, 1.0, -1.0, 1.0))

    def test_unknown_key(self):
        with self.assertRaises(ParseError) as ctx:
            parse_surface('ambient_dim = 3\ncolour = "red"\n')
        self.assertEqual(ctx.exception.line, 2)

    def test_repeated_single_keys(self):
        for key, value in (("ambient_dim", "3"), ("name", '"a"'), ("u_range", "0 1")):
            text = f'ambient_dim = 3\n{key} = {value}\n{key} = {value}\ncomponent = "u"\n'
            with self.assertRaises(ParseError, msg=key) as ctx:
                parse_surface(text)
            self.assertIn("duplicate key", str(ctx.exception))

    def test_component_error_points_into_the_file(self):
        with self.assertRaises(ParseError) as ctx:
            parse_surface('ambient_dim = 3\ncomponent   = "u+*"\n')
        self.assertEqual(ctx.exception.line, 2)
        self.assertEqual(ctx.exception.column, 18)

    def test_component_count_mismatch(self):
        with self.assertRaises(DimensionError):
            parse_surface('ambient_dim = 4\ncomponent = "u"\ncomponent = "v"\ncomponent = "u*v"\n')

    def test_missing_dimension_and_bad_ranges(self):
        with self.assertRaises(ParseError):
            parse_surface('component = "u"\n')
        with self.assertRaises(DimensionError):
            parse_surface('ambient_dim = 6\n')
        with self.assertRaises(ParseError):
            parse_surface('ambient_dim = 3\nu_range = 1 -1\n')
        with self.assertRaises(ParseError):
            parse_surface('ambient_dim = 3\nv_range = 0\n')

    def test_sample_files_load(self):
        for path in sorted(SAMPLES.glob("*.srf")):
            chart = load_surface(path)
            self.assertEqual(len(chart.components), chart.ambient_dim, path.name)

    def test_chart_rejects_wrong_component_count(self):
        with self.assertRaises(DimensionError):
            SurfaceChart.from_expressions("bad", ["u", "v"])


class ChartEvaluationTests(SimpleTestCase):
    def test_example_partials_at_origin(self):
        X = EXAMPLE5.jet(0.0, 0.0)
        np.testing.assert_allclose(X.value, np.zeros(5), atol=1e-15)
        np.testing.assert_allclose(X.partial(1, 0), [0, 1, 1, 0, 0])
        np.testing.assert_allclose(X.partial(0, 1), [0, 1, -1, 0, 0])
        np.testing.assert_allclose(X.partial(2, 0), [0, 0, 0, 1, 1])
        np.testing.assert_allclose(X.partial(1, 1), np.zeros(5), atol=1e-15)
        np.testing.assert_allclose(X.partial(0, 2), [0, 0, 0, 1, -1])
        for idx in ((3, 0), (2, 1), (1, 2), (0, 3)):
            np.testing.assert_allclose(X.partial(*idx), np.zeros(5), atol=1e-15)

    def test_mixed_fourth_order_term_shows_at_other_points(self):
        X = EXAMPLE5.jet(0.5, 2.0 / 3.0)
        # ∂³(u²v²)/∂u²∂v = 4v
        self.assertAlmostEqual(float(X.partial(2, 1)[0]), 4 * 2.0 / 3.0)

    def test_evaluation_is_deterministic(self):
        a = eval_chart(EXAMPLE5, 0.3, -0.7)
        b = eval_chart(EXAMPLE5, 0.3, -0.7)
        for x, y in zip(a, b):
            self.assertTrue(np.array_equal(x.coeffs, y.coeffs))

    def test_values_match_jets(self):
        us = np.array([0.1, -0.4])
        vs = np.array([0.2, 1.1])
        vals = EXAMPLE5.values(us, vs)
        self.assertEqual(vals.shape, (2, 5))
        for k in range(2):
            np.testing.assert_allclose(vals[k], EXAMPLE5.jet(us[k], vs[k]).value)

    def test_outside_domain_logs_warning(self):
        with self.assertLogs("surfaces.surface_dsl", level="WARNING"):
            eval_chart(EXAMPLE5, 2.0, 0.0)

    def test_sqrt_chart_domain_error(self):
        chart = SurfaceChart.from_expressions("cone", ["u", "v", "sqrt(u^2+v^2)"])
        self.assertAlmostEqual(float(chart.jet(0.6, 0.8).value[2]), 1.0)
        with self.assertRaises(DomainError):
            chart.jet(0.0, 0.0)
        self.assertTrue(math.isfinite(float(chart.jet(0.6, 0.8).partial(3, 0)[2])))
