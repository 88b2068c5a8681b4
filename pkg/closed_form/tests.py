import math
from fractions import Fraction

import numpy as np
from django.test import SimpleTestCase

from core.exceptions import DegenerateLevel, Infeasible, SupportMismatch
from core.types import FrequencyMatrix, point_mass, validate_stochastic

from .formulas import (
    dim_closed_form,
    dim_eggleston,
    dim_peyriere,
    in_pi_alpha,
    lyapunov_denominator,
    max_digit_frequency,
)
from .instances import random_feasible_instance
from .recursion import check_feasibility, lemma_recursion, optimal_matrix


def shared_instance():
    """d = (1/2, 1/2) on bases 2, 3 and alpha = (1/2, 1/3, 1/6)."""
    d = validate_stochastic({2: Fraction(1, 2), 3: Fraction(1, 2)})
    alpha = validate_stochastic({0: Fraction(1, 2), 1: Fraction(1, 3), 2: Fraction(1, 6)})
    return alpha, d


TWO_TWO_THREE = validate_stochastic({2: Fraction(2, 3), 3: Fraction(1, 3)})


class FeasibilityTests(SimpleTestCase):

    def test_feasible_tail_sums(self):
        report = check_feasibility(validate_stochastic({0: 0.6, 1: 0.3, 2: 0.1}), TWO_TWO_THREE)
        self.assertTrue(report.feasible)
        self.assertIsNone(report.violated_level)
        self.assertAlmostEqual(report.slack[3], 1 / 3 - 0.1)

    def test_digit_two_frequency_bound(self):
        report = check_feasibility(validate_stochastic({0: 0.3, 1: 0.3, 2: 0.4}), TWO_TWO_THREE)
        self.assertFalse(report.feasible)
        self.assertEqual(report.violated_level, 3)
        self.assertAlmostEqual(max_digit_frequency(TWO_TWO_THREE, 2), 1 / 3)

    def test_constant_base(self):
        report = check_feasibility(validate_stochastic({0: 0.5, 1: 0.5}), validate_stochastic({2: 1}))
        self.assertTrue(report.feasible)

    def test_feasible_iff_all_slacks_positive(self):
        rng = np.random.default_rng(5)
        for _ in range(100):
            L = int(rng.integers(2, 7))
            d = validate_stochastic({n: float(w) for n, w in zip(range(2, L + 1), rng.dirichlet(np.ones(L - 1)))})
            alpha = validate_stochastic({j: float(a) for j, a in enumerate(rng.dirichlet(np.ones(L)))})
            report = check_feasibility(alpha, d)
            self.assertEqual(report.feasible, all(s > 1e-12 for s in report.slack.values()))

    def test_mass_beyond_largest_base(self):
        with self.assertRaises(SupportMismatch):
            check_feasibility(validate_stochastic({0: 0.5, 2: 0.5}), validate_stochastic({2: 1}))

    def test_base_below_first_digit_is_violated(self):
        d = validate_stochastic({2: 0.5, 3: 0.5})
        report = check_feasibility(point_mass(2), d)
        self.assertFalse(report.feasible)
        self.assertEqual(report.violated_level, 2)


class RecursionTests(SimpleTestCase):

    def test_worked_instance(self):
        alpha, d = shared_instance()
        table = lemma_recursion(alpha, d)
        self.assertEqual(table.j0, 0)
        self.assertEqual(table.L, 3)
        self.assertAlmostEqual(table.A[2], 5 / 6, places=14)
        self.assertAlmostEqual(table.A[3], 1 / 2, places=14)
        self.assertAlmostEqual(table.r[2], 6 / 5, places=14)
        self.assertAlmostEqual(table.r[3], 4 / 5, places=14)
        for j, expected in enumerate([1 / 2, 1 / 3, 5 / 12]):
            self.assertAlmostEqual(table.t[j], expected, places=14)

    def test_single_base(self):
        table = lemma_recursion(validate_stochastic({0: 0.5, 1: 0.5}), validate_stochastic({2: 1}))
        self.assertEqual(table.j0, 0)
        self.assertAlmostEqual(table.A[2], 1.0, places=15)
        self.assertAlmostEqual(table.r[2], 1.0, places=15)
        self.assertAlmostEqual(table.t[0], 0.5, places=15)
        self.assertAlmostEqual(table.t[1], 0.5, places=15)

    def test_point_mass_at_zero(self):
        d = validate_stochastic({2: 0.25, 3: 0.25, 5: 0.5})
        table = lemma_recursion(point_mass(0), d)
        P = optimal_matrix(table)
        self.assertEqual(table.t[0], 1.0)
        for n in P.bases:
            self.assertAlmostEqual(P.entry(n, 0), 1.0, places=14)

    def test_infeasible_input(self):
        with self.assertRaises(Infeasible) as ctx:
            lemma_recursion(validate_stochastic({0: 0.3, 1: 0.3, 2: 0.4}), TWO_TWO_THREE)
        self.assertEqual(ctx.exception.report.violated_level, 3)

    def test_boundary_input_is_degenerate(self):
        third = Fraction(1, 3)
        with self.assertRaises(DegenerateLevel) as ctx:
            lemma_recursion(validate_stochastic({0: third, 1: third, 2: third}), TWO_TWO_THREE)
        self.assertEqual(ctx.exception.level, 2)

    def test_stage_identities(self):
        rng = np.random.default_rng(17)
        for _ in range(50):
            alpha, d = random_feasible_instance(rng, max_base=8)
            table = lemma_recursion(alpha, d)
            P = optimal_matrix(table)
            for n in range(table.j0 + 1, table.L + 1):
                self.assertGreater(table.A[n], 0)
                stage = [table.alpha_stage[(n, j)] for j in range(table.j0, n)]
                self.assertAlmostEqual(math.fsum(stage), table.A[n], delta=1e-12)
                for j in range(table.j0, n):
                    # alpha_j^(n) = alpha_j - sum_{k=j+1}^{n-1} d_k p_{k,j}
                    used = math.fsum(d[k] * P.entry(k, j) for k in range(max(j + 1, 2), n))
                    self.assertAlmostEqual(table.alpha_stage[(n, j)], alpha[j] - used, delta=1e-12)
            self.assertTrue(all(v >= 0 for v in table.r.values()))
            self.assertTrue(all(v >= 0 for v in table.t.values()))


class OptimalMatrixTests(SimpleTestCase):

    def test_worked_instance_rows(self):
        P = optimal_matrix(lemma_recursion(*shared_instance()))
        np.testing.assert_allclose(P.row(2), [3 / 5, 2 / 5], atol=1e-14)
        np.testing.assert_allclose(P.row(3), [2 / 5, 4 / 15, 1 / 3], atol=1e-14)

    def test_constant_base(self):
        P = optimal_matrix(lemma_recursion(validate_stochastic({0: 0.5, 1: 0.5}), validate_stochastic({2: 1})))
        np.testing.assert_allclose(P.row(2), [0.5, 0.5], atol=1e-15)

    def test_rows_below_first_digit_are_uniform(self):
        d = validate_stochastic({2: 0.0, 3: 1.0})
        P = optimal_matrix(lemma_recursion(point_mass(2), d))
        np.testing.assert_allclose(P.row(3), [0, 0, 1], atol=1e-15)
        np.testing.assert_allclose(P.row(2), [0.5, 0.5])
        self.assertTrue(in_pi_alpha(P, d, point_mass(2)))

    def test_product_form_is_exact(self):
        alpha, d = shared_instance()
        table = lemma_recursion(alpha, d)
        P = optimal_matrix(table)
        for n in P.bases:
            for j in range(table.j0, n):
                self.assertEqual(P.entry(n, j), table.r[n] * table.t[j])

    def test_constraints_on_random_instances(self):
        rng = np.random.default_rng(2024)
        for _ in range(200):
            alpha, d = random_feasible_instance(rng, max_base=10, min_slack=0.05)
            table = lemma_recursion(alpha, d)
            P = optimal_matrix(table)
            for n in range(max(table.j0 + 1, 2), table.L + 1):
                self.assertAlmostEqual(math.fsum(P.row(n)[table.j0:]), 1.0, delta=1e-12)
            marginal = P.column_marginal(d)
            for j in range(table.j0, table.L):
                self.assertAlmostEqual(marginal[j], alpha[j], delta=1e-12)
            self.assertAlmostEqual(table.A[table.L], d[table.L], delta=1e-12)
            self.assertTrue(in_pi_alpha(P, d, alpha, tol=1e-10))


class DimensionTests(SimpleTestCase):

    def test_worked_instance(self):
        alpha, d = shared_instance()
        report = dim_closed_form(alpha, d)
        self.assertAlmostEqual(report.dimension, 0.98127, delta=5e-5)
        self.assertAlmostEqual(report.numerator_entropy, 0.87910, delta=5e-5)
        self.assertAlmostEqual(report.denominator_lyapunov, 0.89588, delta=5e-5)
        self.assertAlmostEqual(report.dimension, report.numerator_entropy / report.denominator_lyapunov)
        self.assertFalse(report.is_full_dimension)

    def test_peyriere_on_worked_matrix(self):
        alpha, d = shared_instance()
        P = FrequencyMatrix({2: [3 / 5, 2 / 5], 3: [2 / 5, 4 / 15, 1 / 3]})
        self.assertAlmostEqual(dim_peyriere(P, d), 0.98127, delta=5e-5)

    def test_uniform_rows_have_dimension_one(self):
        d = validate_stochastic({2: 0.2, 3: 0.3, 7: 0.5})
        self.assertAlmostEqual(dim_peyriere(FrequencyMatrix.uniform([2, 3, 7]), d), 1.0, delta=1e-12)

    def test_deterministic_rows_have_dimension_zero(self):
        d = validate_stochastic({2: 0.5, 3: 0.5})
        P = FrequencyMatrix({2: [0, 1], 3: [0, 0, 1]})
        self.assertEqual(dim_peyriere(P, d), 0.0)

    def test_borel_normal_case(self):
        for b in range(2, 9):
            alpha = validate_stochastic({j: Fraction(1, b) for j in range(b)})
            report = dim_closed_form(alpha, point_mass(b))
            self.assertAlmostEqual(report.dimension, 1.0, delta=1e-12)
            self.assertTrue(report.is_full_dimension)

    def test_uniform_marginal_reaches_full_dimension(self):
        d = validate_stochastic({2: Fraction(1, 2), 3: Fraction(1, 2)})
        alpha = validate_stochastic({0: Fraction(5, 12), 1: Fraction(5, 12), 2: Fraction(1, 6)})
        report = dim_closed_form(alpha, d)
        self.assertTrue(report.is_full_dimension)
        self.assertAlmostEqual(report.dimension, 1.0, delta=1e-12)

    def test_eggleston_base_three(self):
        alpha = validate_stochastic({0: 0.5, 1: 0.5, 2: 0.0})
        expected = math.log(2) / math.log(3)
        self.assertAlmostEqual(dim_eggleston(alpha, 3), expected, delta=1e-12)
        self.assertAlmostEqual(dim_closed_form(alpha, point_mass(3)).dimension, expected, delta=1e-12)

    def test_eggleston_limits(self):
        self.assertAlmostEqual(dim_eggleston(validate_stochastic({0: 0.5, 1: 0.5}), 2), 1.0, delta=1e-15)
        self.assertEqual(dim_eggleston(validate_stochastic({0: 1.0, 1: 0.0}), 2), 0.0)
        with self.assertRaises(SupportMismatch):
            dim_eggleston(validate_stochastic({0: 0.5, 2: 0.5}), 2)

    def test_eggleston_agrees_with_closed_form(self):
        rng = np.random.default_rng(8)
        for _ in range(30):
            b = int(rng.integers(2, 10))
            alpha = validate_stochastic({j: float(a) for j, a in enumerate(rng.dirichlet(np.ones(b)))})
            self.assertAlmostEqual(
                dim_eggleston(alpha, b), dim_closed_form(alpha, point_mass(b)).dimension, delta=1e-12
            )

    def test_point_masses_have_dimension_zero(self):
        d = validate_stochastic({3: 0.5, 4: 0.5})
        for j in range(3):
            self.assertAlmostEqual(dim_closed_form(point_mass(j), d).dimension, 0.0, delta=1e-12)

    def test_formula_bridge_on_random_instances(self):
        rng = np.random.default_rng(99)
        for _ in range(200):
            alpha, d = random_feasible_instance(rng, max_base=10, min_slack=0.05)
            report = dim_closed_form(alpha, d)
            self.assertAlmostEqual(report.dimension, dim_peyriere(report.optimal_matrix, d), delta=1e-10)
            self.assertGreaterEqual(report.dimension, -1e-12)
            self.assertLessEqual(report.dimension, 1 + 1e-12)

    def test_lyapunov_denominator(self):
        self.assertAlmostEqual(lyapunov_denominator(TWO_TWO_THREE), (2 * math.log(2) + math.log(3)) / 3)


class InPiAlphaTests(SimpleTestCase):

    def test_uniform_rows_miss_the_target(self):
        alpha, d = shared_instance()
        self.assertFalse(in_pi_alpha(FrequencyMatrix.uniform([2, 3]), d, alpha))

    def test_perturbed_alpha(self):
        alpha, d = shared_instance()
        P = dim_closed_form(alpha, d).optimal_matrix
        self.assertTrue(in_pi_alpha(P, d, alpha))
        other = validate_stochastic({0: 0.5 + 1e-6, 1: 1 / 3 - 1e-6, 2: 1 / 6})
        self.assertFalse(in_pi_alpha(P, d, other))

    def test_missing_row(self):
        alpha, d = shared_instance()
        self.assertFalse(in_pi_alpha(FrequencyMatrix.uniform([2]), d, alpha))
