from fractions import Fraction

import numpy as np
from django.test import SimpleTestCase
from scipy.special import rel_entr

from closed_form.formulas import dim_closed_form, dim_peyriere, in_pi_alpha
from closed_form.instances import random_feasible_instance
from core.exceptions import Infeasible, NotConverged, ValidationError
from core.types import point_mass, validate_stochastic

from .kifer import elementary_moves, sample_pi_alpha, verify_kifer
from .solvers import METHODS, Lattice, SolverConfig, solve_variational


def shared_instance():
    d = validate_stochastic({2: Fraction(1, 2), 3: Fraction(1, 2)})
    alpha = validate_stochastic({0: Fraction(1, 2), 1: Fraction(1, 3), 2: Fraction(1, 6)})
    return alpha, d


def constant_base_instance():
    return validate_stochastic({0: 0.5, 1: 0.5}), validate_stochastic({2: 1})


class SolverConfigTests(SimpleTestCase):

    def test_defaults_come_from_settings(self):
        cfg = SolverConfig()
        self.assertEqual(cfg.method, "ipf")
        self.assertEqual(cfg.tol, 1e-10)
        self.assertEqual(cfg.max_iter, 10**5)

    def test_rejects_bad_values(self):
        for kwargs in ({"method": "newton"}, {"tol": 0}, {"max_iter": 0}, {"step": 1.5}, {"init": "zeros"}):
            with self.subTest(kwargs=kwargs), self.assertRaises(ValidationError):
                SolverConfig(**kwargs)


class SolveVariationalTests(SimpleTestCase):

    def test_shared_instance_both_methods(self):
        alpha, d = shared_instance()
        expected = {2: [3 / 5, 2 / 5], 3: [2 / 5, 4 / 15, 1 / 3]}
        for method in METHODS:
            with self.subTest(method=method):
                result = solve_variational(alpha, d, SolverConfig(method=method))
                self.assertTrue(result.converged)
                for n, row in expected.items():
                    np.testing.assert_allclose(result.matrix.row(n), row, atol=1e-8)
                self.assertAlmostEqual(result.objective, 0.98127, delta=5e-5)

    def test_constant_base_is_determined(self):
        alpha, d = constant_base_instance()
        for method in METHODS:
            result = solve_variational(alpha, d, SolverConfig(method=method))
            self.assertLessEqual(result.iterations, 2)
            np.testing.assert_allclose(result.matrix.row(2), [0.5, 0.5])
            self.assertAlmostEqual(result.objective, 1.0, places=12)

    def test_point_mass_alpha(self):
        _, d = shared_instance()
        result = solve_variational(point_mass(0), d)
        self.assertEqual(result.matrix.entry(2, 0), 1.0)
        self.assertEqual(result.matrix.entry(3, 0), 1.0)
        self.assertEqual(result.objective, 0.0)

    def test_infeasible_instance(self):
        d = validate_stochastic({2: Fraction(2, 3), 3: Fraction(1, 3)})
        alpha = validate_stochastic({0: 0.3, 1: 0.3, 2: 0.4})
        with self.assertRaises(Infeasible):
            solve_variational(alpha, d)

    def test_not_converged_carries_last_iterate(self):
        alpha, d = shared_instance()
        with self.assertRaises(NotConverged) as ctx:
            solve_variational(alpha, d, SolverConfig(max_iter=1))
        self.assertEqual(ctx.exception.iterations, 1)
        self.assertIn("row", ctx.exception.residuals)
        self.assertFalse(ctx.exception.result.converged)

    def test_optimum_is_a_fixed_point(self):
        alpha, d = shared_instance()
        P = dim_closed_form(alpha, d).optimal_matrix
        lattice = Lattice.build(alpha, d)
        start = lattice.from_matrix(P)
        moves = []
        solve_variational(alpha, d, initial=P, callback=lambda i, x: moves.append(np.max(np.abs(x - start))))
        self.assertLessEqual(moves[0], 1e-10)

    def test_distance_to_optimum_never_increases(self):
        rng = np.random.default_rng(11)
        for alpha, d in [shared_instance()] + [random_feasible_instance(rng, max_base=6) for _ in range(5)]:
            lattice = Lattice.build(alpha, d)
            weights = lattice.weights[:, None]
            target = weights * lattice.from_matrix(dim_closed_form(alpha, d).optimal_matrix)
            divergences = []

            def record(_, x):
                divergences.append(rel_entr(target, weights * x)[lattice.mask].sum())

            solve_variational(alpha, d, SolverConfig(init="random", seed=3), callback=record)
            self.assertTrue(all(b <= a + 1e-12 for a, b in zip(divergences, divergences[1:])))

    def test_agrees_with_closed_form_on_random_instances(self):
        rng = np.random.default_rng(2024)
        for _ in range(50):
            alpha, d = random_feasible_instance(rng, max_base=8)
            closed = dim_closed_form(alpha, d).dimension
            for method in METHODS:
                result = solve_variational(alpha, d, SolverConfig(method=method))
                self.assertLessEqual(abs(result.objective - closed), 1e-6)
                self.assertTrue(in_pi_alpha(result.matrix, d, alpha, tol=1e-9))

    def test_optimum_has_product_form(self):
        rng = np.random.default_rng(8)
        for alpha, d in [shared_instance()] + [random_feasible_instance(rng, max_base=7) for _ in range(10)]:
            P = solve_variational(alpha, d).matrix
            bases = d.support
            for a, n in enumerate(bases):
                for m in bases[a + 1:]:
                    digits = [j for j in range(min(n, m)) if alpha[j] > 0]
                    for j in digits:
                        for k in digits:
                            cross = P.entry(n, j) * P.entry(m, k) - P.entry(n, k) * P.entry(m, j)
                            self.assertLessEqual(abs(cross), 1e-6)


class SamplePiAlphaTests(SimpleTestCase):

    def test_samples_stay_in_pi_alpha(self):
        alpha, d = shared_instance()
        samples = sample_pi_alpha(alpha, d, 100, seed=1)
        self.assertEqual(len(samples), 100)
        for P in samples:
            self.assertTrue(in_pi_alpha(P, d, alpha, tol=1e-10))
        self.assertNotEqual(samples[0], samples[1])

    def test_constant_base_has_no_moves(self):
        alpha, d = constant_base_instance()
        self.assertEqual(elementary_moves(alpha, d), [])
        P = dim_closed_form(alpha, d).optimal_matrix
        samples = sample_pi_alpha(alpha, d, 100, seed=1)
        self.assertEqual(len(samples), 100)
        self.assertTrue(all(s == P for s in samples))

    def test_zero_scale_returns_optimum(self):
        alpha, d = shared_instance()
        P = dim_closed_form(alpha, d).optimal_matrix
        self.assertTrue(all(s == P for s in sample_pi_alpha(alpha, d, 5, seed=1, scale=0)))

    def test_moves_respect_digit_support(self):
        d = validate_stochastic({3: 0.5, 4: 0.5})
        alpha = validate_stochastic({1: 0.4, 2: 0.4, 3: 0.2})
        self.assertEqual(elementary_moves(alpha, d), [(3, 4, 1, 2)])


class VerifyKiferTests(SimpleTestCase):

    def test_shared_instance(self):
        alpha, d = shared_instance()
        report = verify_kifer(alpha, d, count=500, seed=7)
        self.assertTrue(report.passed)
        self.assertLess(report.max_gap, 0)
        self.assertEqual({c.method for c in report.checks}, set(METHODS))
        for check in report.checks:
            self.assertLessEqual(abs(check.gap), 1e-6)

    def test_constant_base(self):
        alpha, d = constant_base_instance()
        report = verify_kifer(alpha, d, count=20)
        self.assertTrue(report.passed)
        self.assertEqual(report.moves, 0)
        self.assertAlmostEqual(report.max_sampled_dimension, 1.0, places=12)

    def test_random_instances(self):
        rng = np.random.default_rng(99)
        for seed in range(50):
            alpha, d = random_feasible_instance(rng, max_base=8)
            report = verify_kifer(alpha, d, count=500, seed=seed)
            self.assertTrue(report.passed, msg=f"instance {seed}: {report}")

    def test_samples_never_beat_closed_form(self):
        alpha, d = shared_instance()
        closed = dim_closed_form(alpha, d).dimension
        for P in sample_pi_alpha(alpha, d, 200, seed=4):
            self.assertLessEqual(dim_peyriere(P, d), closed + 1e-9)
