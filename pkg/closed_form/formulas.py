# closed_form/formulas.py
"""
Dimension formulas. Every formula is an entropy over a Lyapunov exponent:

    dimension = -(sum of p log p, d-weighted) / (sum_n d_n log n)

The minus sign is applied to the numerator so all values lie in [0, 1];
0 log 0 is taken as 0 throughout.
"""
import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import entr

from core.exceptions import EmptyDenominator, SupportMismatch
from core.types import FrequencyMatrix, StochasticVector

from .recursion import RecursionTable, lemma_recursion, optimal_matrix

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class DimensionReport:
    """
    numerator_entropy is the NEGATED numerator of the closed form,
    -(sum_j alpha_j log t_j + sum_i d_i log r_i), so that
    dimension = numerator_entropy / denominator_lyapunov >= 0.
    """
    dimension: float
    numerator_entropy: float
    denominator_lyapunov: float
    optimal_matrix: FrequencyMatrix
    recursion: RecursionTable
    alpha: StochasticVector
    d: StochasticVector

    @property
    def is_full_dimension(self):
        """True iff every row of P^alpha on the support of d is uniform."""
        return all(
            np.allclose(self.optimal_matrix.row(n), 1.0 / n, rtol=0, atol=1e-12)
            for n in self.d.support
        )


# ═══════════════════════════════════════════════════════════════
# 📐 BUILDING BLOCKS
# ═══════════════════════════════════════════════════════════════

def lyapunov_denominator(d):
    """sum_n d_n log n."""
    value = math.fsum(d[n] * math.log(n) for n in d.support)
    if value <= 0:
        raise EmptyDenominator()
    return value


def peyriere_entropy(P, d):
    """-sum_n d_n sum_j p_{n,j} log p_{n,j} over the support of d."""
    terms = []
    for n in d.support:
        if n not in P.rows:
            raise SupportMismatch(n, f"No row for base {n} although d_{n} > 0")
        terms.append(d[n] * math.fsum(entr(P.row(n))))
    return math.fsum(terms)


def max_digit_frequency(d, j):
    """Largest frequency the digits >= j can reach: only bases k > j can produce them."""
    return d.mass_from(j + 1)


# ═══════════════════════════════════════════════════════════════
# 📏 DIMENSIONS
# ═══════════════════════════════════════════════════════════════

def dim_peyriere(P, d):
    return peyriere_entropy(P, d) / lyapunov_denominator(d)


def dim_closed_form(alpha, d):
    table = lemma_recursion(alpha, d)
    terms = [alpha[j] * table.log_t[j] for j in range(table.j0, table.L) if alpha[j] > 0]
    terms += [d[i] * table.log_r[i] for i in d.support if i > table.j0]
    numerator = -math.fsum(terms)
    denominator = lyapunov_denominator(d)
    dimension = numerator / denominator
    logger.debug("Closed form: %r / %r = %r", numerator, denominator, dimension)
    return DimensionReport(
        dimension=dimension,
        numerator_entropy=numerator,
        denominator_lyapunov=denominator,
        optimal_matrix=optimal_matrix(table),
        recursion=table,
        alpha=alpha,
        d=d,
    )


def dim_eggleston(alpha, b):
    """Constant base b: -sum_j alpha_j log alpha_j / log b."""
    if alpha.support_max >= b:
        raise SupportMismatch(alpha.support_max, f"Digit {alpha.support_max} is impossible in base {b}")
    values = np.array([alpha[j] for j in range(b)])
    return math.fsum(entr(values)) / math.log(b)


def in_pi_alpha(P, d, alpha, tol=1e-10):
    """P has stochastic rows on the support of d and its d-weighted column sums equal alpha."""
    try:
        marginal = P.column_marginal(d)
    except SupportMismatch:
        return False
    for n in d.support:
        if abs(math.fsum(P.row(n)) - 1.0) > tol:
            return False
    for j in set(marginal) | set(alpha.entries):
        if abs(marginal.get(j, 0.0) - alpha[j]) > tol:
            return False
    return True
