import math
from fractions import Fraction

import numpy as np
from django.test import SimpleTestCase

from closed_form.formulas import dim_closed_form
from core.exceptions import SupportMismatch, ValidationError, ZeroMeasurePrefix
from core.types import BasePattern, FrequencyMatrix, validate_stochastic
from expansion.utils import DigitString, digit_stats

from .measure import (
    MINUS_INFINITY,
    CylinderMeasure,
    default_depths,
    frequency_tolerance,
    log_mu_cylinder,
    log_mu_from_stats,
    pointwise_dimension_trace,
    sample_digits,
    sample_many,
    spawn_seeds,
)

TWO_THREE = BasePattern((2, 3))


def shared_report():
    d = validate_stochastic({2: Fraction(1, 2), 3: Fraction(1, 2)})
    alpha = validate_stochastic({0: Fraction(1, 2), 1: Fraction(1, 3), 2: Fraction(1, 6)})
    return dim_closed_form(alpha, d)


def shared_measure():
    return CylinderMeasure(shared_report().optimal_matrix, TWO_THREE)


class LogMuTests(SimpleTestCase):

    def test_empty_prefix(self):
        self.assertEqual(log_mu_cylinder(shared_measure(), DigitString((), TWO_THREE)), 0.0)

    def test_product_of_entries(self):
        value = log_mu_cylinder(shared_measure(), DigitString((1, 2), TWO_THREE))
        self.assertAlmostEqual(value, math.log(2 / 5) + math.log(1 / 3), places=12)

    def test_zero_probability_digit(self):
        d = validate_stochastic({3: 1})
        alpha = validate_stochastic({1: 0.5, 2: 0.5})
        m = CylinderMeasure(dim_closed_form(alpha, d).optimal_matrix, BasePattern((3,)))
        self.assertEqual(log_mu_cylinder(m, DigitString((1, 0), m.pattern)), MINUS_INFINITY)

    def test_missing_row(self):
        with self.assertRaises(SupportMismatch):
            CylinderMeasure(FrequencyMatrix.uniform([2]), TWO_THREE)

    def test_string_over_other_pattern(self):
        with self.assertRaises(ValidationError):
            log_mu_cylinder(shared_measure(), DigitString((0, 0), BasePattern((3, 2))))

    def test_children_sum_to_parent(self):
        m = shared_measure()
        rng = np.random.default_rng(0)
        for depth in rng.integers(0, 31, size=25):
            s = sample_digits(m, int(depth), seed=int(rng.integers(1 << 30)))
            parent = math.exp(log_mu_cylinder(m, s))
            base = TWO_THREE.base_at(len(s) + 1)
            children = math.fsum(math.exp(log_mu_cylinder(m, s.extend(j))) for j in range(base))
            self.assertLessEqual(abs(children - parent), 1e-12 * parent)

    def test_counts_form_matches_product(self):
        report = shared_report()
        m = CylinderMeasure(report.optimal_matrix, TWO_THREE)
        s = sample_digits(m, 2000, seed=5)
        self.assertAlmostEqual(
            log_mu_from_stats(report.recursion, digit_stats(s)),
            log_mu_cylinder(m, s),
            delta=1e-9 * abs(log_mu_cylinder(m, s)),
        )


class SampleDigitsTests(SimpleTestCase):

    def test_reproducible(self):
        m = shared_measure()
        self.assertEqual(sample_digits(m, 500, seed=42), sample_digits(m, 500, seed=42))
        self.assertNotEqual(sample_digits(m, 500, seed=42), sample_digits(m, 500, seed=43))

    def test_deterministic_rows(self):
        P = FrequencyMatrix({2: [0, 1], 3: [0, 0, 1]})
        s = sample_digits(CylinderMeasure(P, TWO_THREE), 10, seed=1)
        self.assertEqual(s.digits, (1, 2) * 5)

    def test_digit_frequencies_within_sigma(self):
        n = 10**5
        s = sample_digits(shared_measure(), n, seed=20240601)
        freqs = digit_stats(s).frequencies()
        for j, a in {0: 1 / 2, 1: 1 / 3, 2: 1 / 6}.items():
            self.assertLessEqual(abs(freqs[j] - a), frequency_tolerance(a, n))

    def test_joint_frequencies_match_rows(self):
        m = shared_measure()
        stats = digit_stats(sample_digits(m, 10**5, seed=7))
        for (k, j), count in stats.tau_joint.items():
            p = m.matrix.entry(k, j)
            D = stats.base_counts[k]
            self.assertLessEqual(abs(count / D - p), frequency_tolerance(p, D))

    def test_spawned_seeds_are_independent(self):
        m = shared_measure()
        strings = sample_many(m, 200, master=3, count=4)
        self.assertEqual(len({s.digits for s in strings}), 4)
        again = sample_many(m, 200, master=3, count=4)
        self.assertEqual(strings, again)
        self.assertEqual(len(spawn_seeds(3, 4)), 4)


class DimensionTraceTests(SimpleTestCase):

    def test_converges_to_closed_form(self):
        report = shared_report()
        m = CylinderMeasure(report.optimal_matrix, TWO_THREE)
        s = sample_digits(m, 10**5, seed=1234)
        trace = pointwise_dimension_trace(m, s, [10**5])
        self.assertLessEqual(abs(trace.ratio[-1] - report.dimension), 0.01)
        self.assertAlmostEqual(report.dimension, 0.98127, delta=5e-5)

    def test_uniform_binary_is_one(self):
        d = validate_stochastic({2: 1})
        alpha = validate_stochastic({0: 0.5, 1: 0.5})
        m = CylinderMeasure(dim_closed_form(alpha, d).optimal_matrix, BasePattern((2,)))
        s = sample_digits(m, 1000, seed=9)
        trace = pointwise_dimension_trace(m, s, range(1, 1001))
        np.testing.assert_allclose(trace.ratio, 1.0, rtol=0, atol=1e-12)

    def test_deterministic_matrix_is_zero(self):
        P = FrequencyMatrix({2: [1, 0], 3: [0, 1, 0]})
        m = CylinderMeasure(P, TWO_THREE)
        trace = pointwise_dimension_trace(m, sample_digits(m, 50, seed=0), [1, 10, 50])
        self.assertEqual(trace.ratio.tolist(), [0.0, 0.0, 0.0])
        self.assertTrue(np.all(trace.log_len < 0))

    def test_zero_measure_prefix(self):
        P = FrequencyMatrix({2: [1, 0], 3: [0, 1, 0]})
        m = CylinderMeasure(P, TWO_THREE)
        with self.assertRaises(ZeroMeasurePrefix) as ctx:
            pointwise_dimension_trace(m, DigitString((0, 1, 1), TWO_THREE), [3])
        self.assertEqual(ctx.exception.depth, 3)

    def test_invalid_depths(self):
        m = shared_measure()
        s = sample_digits(m, 10, seed=0)
        for depths in ([0], [11], [5, 5]):
            with self.subTest(depths=depths), self.assertRaises(ValidationError):
                pointwise_dimension_trace(m, s, depths)

    def test_empty_trace(self):
        m = shared_measure()
        trace = pointwise_dimension_trace(m, sample_digits(m, 0, seed=0), default_depths(0))
        self.assertEqual(len(trace), 0)

    def test_invariants_hold_along_trace(self):
        m = shared_measure()
        s = sample_digits(m, 5000, seed=77)
        trace = pointwise_dimension_trace(m, s, default_depths(5000))
        self.assertEqual(trace.depths[-1], 5000)
        self.assertTrue(np.all(trace.log_mu <= 0))
        self.assertTrue(np.all(trace.log_len < 0))
        self.assertTrue(np.all(trace.ratio >= 0))

    def test_fluctuation_shrinks_with_depth(self):
        report = shared_report()
        m = CylinderMeasure(report.optimal_matrix, TWO_THREE)
        s = sample_digits(m, 10**5, seed=31337)
        deviations = []
        for n in (10**3, 10**4, 10**5):
            trace = pointwise_dimension_trace(m, s, range(n // 2, n + 1))
            deviations.append(np.max(np.abs(trace.ratio - report.dimension)))
        self.assertGreater(deviations[0], deviations[1])
        self.assertGreater(deviations[1], deviations[2])
