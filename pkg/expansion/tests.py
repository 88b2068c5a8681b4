from fractions import Fraction

import numpy as np
from django.test import SimpleTestCase

from core.exceptions import InvalidDigitString, OutOfRange
from core.types import BasePattern

from .utils import (
    DigitString,
    cylinder,
    digit_stats,
    empirical_matrix,
    evaluate,
    evaluate_exact,
    expand,
)

TWO_THREE = BasePattern((2, 3))


class ExpandTests(SimpleTestCase):

    def test_zero(self):
        self.assertEqual(expand(0, BasePattern((2, 5)), 5).digits, (0, 0, 0, 0, 0))

    def test_five_sixths(self):
        s = expand(Fraction(5, 6), TWO_THREE, 4)
        self.assertEqual(s.digits, (1, 2, 0, 0))
        self.assertEqual(evaluate_exact(s), Fraction(5, 6))

    def test_dyadic_half_takes_upper_branch(self):
        self.assertEqual(expand(0.5, BasePattern((2,)), 3).digits, (1, 0, 0))

    def test_one_is_out_of_range(self):
        with self.assertRaises(OutOfRange):
            expand(1, TWO_THREE, 3)
        with self.assertRaises(OutOfRange):
            expand(-0.25, TWO_THREE, 3)

    def test_digit_validation(self):
        with self.assertRaises(InvalidDigitString):
            DigitString((2,), TWO_THREE)

    def test_round_trip_on_grid(self):
        pattern = BasePattern((2, 3, 5, 2, 7))
        for i in range(10**4):
            x = i / 10**4
            n = i % 64 + 1
            s = expand(x, pattern, n)
            c = cylinder(s)
            gap = Fraction(x) - evaluate_exact(s)
            self.assertGreaterEqual(gap, 0)
            self.assertLess(gap, c.length)

    def test_deep_expansion_has_no_drift(self):
        x = Fraction(1, 7)
        s = expand(x, TWO_THREE, 5000)
        self.assertLess(x - evaluate_exact(s), Fraction(1, 6**2500))


class EvaluateTests(SimpleTestCase):

    def test_inverse_of_expand(self):
        self.assertAlmostEqual(evaluate(DigitString((1, 2, 0, 0), TWO_THREE)), 5 / 6, places=15)

    def test_all_zero(self):
        self.assertEqual(evaluate(DigitString((0, 0, 0), TWO_THREE)), 0.0)

    def test_two_term_partial_sum(self):
        self.assertEqual(evaluate_exact(DigitString((1, 2), TWO_THREE)), Fraction(5, 6))


class CylinderTests(SimpleTestCase):

    def test_first_digit(self):
        c = cylinder(DigitString((1,), BasePattern((2,))))
        self.assertEqual((c.left, c.right, c.length), (Fraction(1, 2), Fraction(1), Fraction(1, 2)))

    def test_two_digits(self):
        c = cylinder(DigitString((0, 2), TWO_THREE))
        self.assertEqual(c.left, Fraction(1, 3))
        self.assertEqual(c.right, Fraction(1, 2))
        self.assertEqual(c.length, Fraction(1, 6))

    def test_whole_space(self):
        c = cylinder(DigitString((), TWO_THREE))
        self.assertEqual((c.left, c.length, c.log_length), (0, 1, 0.0))

    def test_deep_cylinders_are_log_space(self):
        s = expand(Fraction(1, 3), TWO_THREE, 100)
        c = cylinder(s)
        self.assertFalse(c.is_exact)
        self.assertAlmostEqual(c.log_length, -50 * np.log(6), places=9)

    def test_children_partition_parent(self):
        pattern = BasePattern((3, 2, 4))
        rng = np.random.default_rng(11)
        for _ in range(50):
            depth = int(rng.integers(0, 20))
            digits = tuple(int(rng.integers(0, pattern.base_at(i))) for i in range(1, depth + 1))
            parent = DigitString(digits, pattern)
            outer = cylinder(parent)
            edge = outer.left
            for e in range(pattern.base_at(depth + 1)):
                child = cylinder(parent.extend(e))
                self.assertEqual(child.left, edge)
                edge = child.right
            self.assertEqual(edge, outer.right)


class DigitStatsTests(SimpleTestCase):

    def test_direct_count(self):
        stats = digit_stats(DigitString((1, 2, 0), BasePattern((2, 3, 2))))
        self.assertEqual(dict(stats.tau), {0: 1, 1: 1, 2: 1})
        self.assertEqual(dict(stats.base_counts), {2: 2, 3: 1})
        self.assertEqual(stats.tau_joint[(3, 2)], 1)

    def test_all_zero_depth_nine(self):
        stats = digit_stats(DigitString((0,) * 9, BasePattern((2, 2, 3))))
        self.assertEqual(dict(stats.tau), {0: 9})
        self.assertEqual(dict(stats.base_counts), {2: 6, 3: 3})

    def test_partition_identities(self):
        pattern = BasePattern((2, 2, 3))
        rng = np.random.default_rng(3)
        for _ in range(20):
            x = float(rng.random())
            s = expand(x, pattern, 300)
            stats = digit_stats(s)
            self.assertEqual(sum(stats.tau.values()), stats.n)
            self.assertEqual(sum(stats.base_counts.values()), stats.n)
            for j, count in stats.tau.items():
                self.assertEqual(sum(c for (k, jj), c in stats.tau_joint.items() if jj == j), count)
            for (k, j), count in stats.tau_joint.items():
                self.assertLess(j, k)
                self.assertLessEqual(count, stats.base_counts[k])
            # digit 2 only occurs at base-3 positions
            self.assertLessEqual(stats.tau.get(2, 0), stats.base_counts[3])

    def test_empirical_matrix_rows(self):
        stats = digit_stats(DigitString((1, 2, 0, 0, 1, 1), BasePattern((2, 3, 2))))
        P = empirical_matrix(stats)
        self.assertEqual(P.bases, (2, 3))
        self.assertAlmostEqual(P.entry(2, 1), 0.5)
        self.assertAlmostEqual(P.entry(3, 2), 0.5)
