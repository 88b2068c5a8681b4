from fractions import Fraction

import numpy as np
from django.test import SimpleTestCase

from .exceptions import (
    DenominatorTooLarge,
    EmptySupport,
    InvalidBase,
    InvalidIndex,
    InvalidMatrixRow,
    IrrationalFrequency,
    NegativeEntry,
    SumNotOne,
    SupportMismatch,
)
from .types import (
    BasePattern,
    FrequencyMatrix,
    base_frequencies_from_pattern,
    pattern_from_frequencies,
    point_mass,
    validate_stochastic,
)


class ValidateStochasticTests(SimpleTestCase):

    def test_symmetric_two_point_vector(self):
        v = validate_stochastic({0: 0.5, 1: 0.5}, tol=1e-12)
        self.assertEqual(v.support_max, 1)
        self.assertEqual(v.first_positive, 0)
        self.assertEqual(v[7], 0.0)

    def test_sum_violation_is_not_renormalized(self):
        with self.assertRaises(SumNotOne) as ctx:
            validate_stochastic({0: 0.5, 1: 0.6})
        self.assertAlmostEqual(ctx.exception.actual_sum, 1.1)

    def test_negative_entry(self):
        with self.assertRaises(NegativeEntry) as ctx:
            validate_stochastic({0: 1.5, 1: -0.5})
        self.assertEqual(ctx.exception.index, 1)

    def test_empty_support(self):
        with self.assertRaises(EmptySupport):
            validate_stochastic({})
        with self.assertRaises(EmptySupport):
            validate_stochastic({0: 0.0})

    def test_negative_index(self):
        with self.assertRaises(InvalidIndex):
            validate_stochastic({-1: 1.0})

    def test_exact_base_frequencies_of_two_two_three(self):
        d = validate_stochastic({2: Fraction(2, 3), 3: Fraction(1, 3)})
        self.assertEqual(d.support_max, 3)
        self.assertTrue(d.is_exact)
        self.assertEqual(d.exact[3], Fraction(1, 3))

    def test_zero_entries_are_kept_out_of_support(self):
        d = validate_stochastic({2: 0.0, 3: 1.0})
        self.assertEqual(d.support, (3,))
        self.assertEqual(d.first_positive, 3)

    def test_point_mass(self):
        v = point_mass(2)
        self.assertEqual(v.support, (2,))
        self.assertEqual(v.mass_from(3), 0.0)


class BasePatternTests(SimpleTestCase):

    def test_bases_must_be_at_least_two(self):
        with self.assertRaises(InvalidBase):
            BasePattern((2, 1))

    def test_frequencies_of_two_two_three(self):
        d = base_frequencies_from_pattern(BasePattern((2, 2, 3)))
        self.assertEqual(d.exact, {2: Fraction(2, 3), 3: Fraction(1, 3)})
        self.assertEqual(sum(d.exact.values()), 1)

    def test_constant_base(self):
        d = base_frequencies_from_pattern(BasePattern((2,)))
        self.assertEqual(dict(d.entries), {2: 1.0})

    def test_uniform_pattern(self):
        d = base_frequencies_from_pattern(BasePattern((2, 3, 4, 5)))
        self.assertEqual(set(d.exact.values()), {Fraction(1, 4)})

    def test_counts_are_exact_at_period_multiples(self):
        p = BasePattern((2, 2, 3, 5))
        d = p.exact_frequencies()
        for periods in range(1, 6):
            n = periods * p.period_length
            for k, count in p.base_counts(n).items():
                self.assertEqual(Fraction(count, n), d[k])

    def test_bases_array(self):
        p = BasePattern((2, 3))
        self.assertEqual(p.bases(5).tolist(), [2, 3, 2, 3, 2])
        self.assertEqual(p.base_at(4), 3)


class PatternFromFrequenciesTests(SimpleTestCase):

    def test_two_thirds_one_third(self):
        d = validate_stochastic({2: Fraction(2, 3), 3: Fraction(1, 3)})
        p = pattern_from_frequencies(d)
        self.assertEqual(p.period_length, 3)
        self.assertEqual(sorted(p.pattern), [2, 2, 3])

    def test_single_base(self):
        p = pattern_from_frequencies(validate_stochastic({5: 1}))
        self.assertEqual(p.pattern, (5,))

    def test_alternating(self):
        d = validate_stochastic({2: Fraction(1, 2), 3: Fraction(1, 2)})
        self.assertEqual(pattern_from_frequencies(d).pattern, (2, 3))

    def test_float_frequencies_close_to_rationals(self):
        d = validate_stochastic({2: 2 / 3, 3: 1 / 3})
        self.assertEqual(sorted(pattern_from_frequencies(d).pattern), [2, 2, 3])

    def test_irrational_frequency(self):
        d = validate_stochastic({2: 1 / np.sqrt(2), 3: 1 - 1 / np.sqrt(2)})
        with self.assertRaises(IrrationalFrequency):
            pattern_from_frequencies(d, limit=1000)

    def test_denominator_limit(self):
        d = validate_stochastic({2: Fraction(1, 1009), 3: Fraction(1008, 1009)})
        with self.assertRaises(DenominatorTooLarge) as ctx:
            pattern_from_frequencies(d, limit=1000)
        self.assertEqual(ctx.exception.q, 1009)

    def test_round_trip_and_discrepancy_bound(self):
        rng = np.random.default_rng(7)
        for _ in range(25):
            bases = sorted(rng.choice(np.arange(2, 12), size=rng.integers(1, 5), replace=False))
            weights = rng.integers(1, 9, size=len(bases))
            total = int(weights.sum())
            d = validate_stochastic({int(b): Fraction(int(w), total) for b, w in zip(bases, weights)})
            p = pattern_from_frequencies(d)
            self.assertEqual(base_frequencies_from_pattern(p).exact, {k: v for k, v in d.exact.items()})
            for n in range(1, 2 * p.period_length + 1):
                for k, count in p.base_counts(n).items():
                    self.assertLessEqual(abs(count - n * d.exact[k]), len(bases))


class FrequencyMatrixTests(SimpleTestCase):

    def test_row_length_must_match_base(self):
        with self.assertRaises(InvalidMatrixRow):
            FrequencyMatrix({3: [0.5, 0.5]})

    def test_row_sum(self):
        with self.assertRaises(InvalidMatrixRow):
            FrequencyMatrix({2: [0.5, 0.6]})

    def test_negative_entries(self):
        with self.assertRaises(InvalidMatrixRow):
            FrequencyMatrix({2: [1.5, -0.5]})

    def test_base_one_is_rejected(self):
        with self.assertRaises(InvalidBase):
            FrequencyMatrix({1: [1.0]})

    def test_impossible_digits_read_as_zero(self):
        P = FrequencyMatrix.uniform([2, 3])
        self.assertEqual(P.entry(2, 2), 0.0)
        self.assertAlmostEqual(P.entry(3, 2), 1 / 3)

    def test_rows_are_read_only(self):
        P = FrequencyMatrix({2: [0.25, 0.75]})
        with self.assertRaises(ValueError):
            P.row(2)[0] = 1.0

    def test_column_marginal(self):
        d = validate_stochastic({2: 0.5, 3: 0.5})
        marginal = FrequencyMatrix.uniform([2, 3]).column_marginal(d)
        self.assertAlmostEqual(marginal[0], 5 / 12)
        self.assertAlmostEqual(marginal[1], 5 / 12)
        self.assertAlmostEqual(marginal[2], 1 / 6)

    def test_column_marginal_needs_rows_on_support(self):
        d = validate_stochastic({2: 0.5, 3: 0.5})
        with self.assertRaises(SupportMismatch):
            FrequencyMatrix.uniform([2]).column_marginal(d)

    def test_perturbation_keeps_invariants(self):
        P = FrequencyMatrix({2: [0.5, 0.5], 3: [0.2, 0.3, 0.5]})
        Q = P.perturbed({2: np.array([0.1, -0.1])}, 1.0)
        self.assertAlmostEqual(Q.entry(2, 0), 0.6)
        with self.assertRaises(InvalidMatrixRow):
            P.perturbed({2: np.array([1.0, -1.0])}, 1.0)
