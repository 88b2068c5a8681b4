# measure_sampler/measure.py
"""
The cylinder measure mu(C(eps_1, ..., eps_n)) = prod_k p_{b_k, eps_k} and the
pointwise dimension estimated along cylinders:

    ratio(n) = log mu(C_n) / log |C_n|,   log |C_n| = -sum_{i<=n} log b_i

All arithmetic on mu is done on logarithms.
"""
import logging
import math
from dataclasses import dataclass

import numpy as np

from core.conf import cantordim_setting
from core.exceptions import SupportMismatch, ValidationError, ZeroMeasurePrefix
from core.types import BasePattern, FrequencyMatrix
from expansion.utils import DigitString

logger = logging.getLogger(__name__)

MINUS_INFINITY = -math.inf


@dataclass(frozen=True)
class CylinderMeasure:
    matrix: FrequencyMatrix
    pattern: BasePattern

    def __post_init__(self):
        for base in set(self.pattern.pattern):
            if base not in self.matrix.rows:
                raise SupportMismatch(base, f"Pattern uses base {base} but the matrix has no row for it")

    def log_row(self, base):
        with np.errstate(divide="ignore"):
            return np.log(self.matrix.row(base))

    def log_factors(self, s):
        """log p_{b_k, eps_k} for every position k of s."""
        if not np.array_equal(s.bases, self.pattern.bases(len(s))):
            raise ValidationError("Digit string is not over the measure's base sequence")
        bases = s.bases
        digits = np.asarray(s.digits, dtype=np.int64)
        out = np.empty(len(s))
        for base in np.unique(bases):
            at = bases == base
            out[at] = self.log_row(int(base))[digits[at]]
        return out


@dataclass(frozen=True)
class DimensionTrace:
    depths: np.ndarray
    log_mu: np.ndarray
    log_len: np.ndarray
    ratio: np.ndarray

    def __len__(self):
        return len(self.depths)

    def rows(self):
        return zip(self.depths.tolist(), self.log_mu.tolist(), self.log_len.tolist(), self.ratio.tolist())


def _rng(seed):
    return np.random.Generator(np.random.PCG64(seed))


# ═══════════════════════════════════════════════════════════════
# 📏 MEASURE
# ═══════════════════════════════════════════════════════════════

def log_mu_cylinder(m, s):
    """sum_k log p_{b_k, eps_k}; MINUS_INFINITY when some factor is zero."""
    if len(s) == 0:
        return 0.0
    factors = m.log_factors(s)
    if np.isneginf(factors).any():
        return MINUS_INFINITY
    return math.fsum(factors)


def log_mu_from_stats(table, stats):
    """
    log mu of a cylinder from its digit counts under P^alpha:
    sum_j tau_j log t_j + sum_i D_i log r_i.
    """
    terms = []
    for base, count in stats.base_counts.items():
        if base not in table.log_r:
            raise SupportMismatch(base, f"Base {base} is outside the recursion window")
        terms.append(count * table.log_r[base])
    for digit, count in stats.tau.items():
        if digit < table.j0 or math.isinf(table.log_t[digit]):
            return MINUS_INFINITY
        terms.append(count * table.log_t[digit])
    return math.fsum(terms)


# ═══════════════════════════════════════════════════════════════
# 🎲 SAMPLING
# ═══════════════════════════════════════════════════════════════

def sample_digits(m, n, seed):
    """
    eps_1 ... eps_n with eps_i drawn from row p_{b_i, .}, independent across positions.
    Positions sharing a base are drawn in one vectorized call, bases in ascending order.
    """
    if n < 0:
        raise ValidationError("Depth must be nonnegative")
    rng = _rng(seed)
    bases = m.pattern.bases(n)
    digits = np.zeros(n, dtype=np.int64)
    for base in np.unique(bases):
        at = np.flatnonzero(bases == base)
        digits[at] = rng.choice(int(base), size=at.size, p=m.matrix.row(int(base)))
    logger.debug("Sampled %d digits with seed %r", n, seed)
    return DigitString(tuple(digits.tolist()), m.pattern)


def spawn_seeds(master, count):
    """Independent child seeds: SeedSequence(master).spawn(count)."""
    return np.random.SeedSequence(master).spawn(count)


def sample_many(m, n, master, count):
    return [sample_digits(m, n, child) for child in spawn_seeds(master, count)]


# ═══════════════════════════════════════════════════════════════
# 📈 POINTWISE DIMENSION
# ═══════════════════════════════════════════════════════════════

def pointwise_dimension_trace(m, s, depths):
    depths = np.asarray(list(depths), dtype=np.int64)
    if depths.size and (depths[0] < 1 or depths[-1] > len(s) or np.any(np.diff(depths) <= 0)):
        raise ValidationError(f"Depths must increase within 1..{len(s)}")

    factors = m.log_factors(s)
    zero = np.flatnonzero(np.isneginf(factors))
    if zero.size and depths.size and zero[0] < depths[-1]:
        raise ZeroMeasurePrefix(int(zero[0]) + 1)

    log_mu = np.cumsum(factors)[depths - 1] if depths.size else np.empty(0)
    log_len = -np.cumsum(np.log(s.bases.astype(float)))[depths - 1] if depths.size else np.empty(0)
    # + 0.0 turns -0.0 into 0.0
    ratio = log_mu / log_len + 0.0
    return DimensionTrace(depths=depths, log_mu=log_mu, log_len=log_len, ratio=ratio)


def default_depths(n, points=200):
    """Up to `points` depths spread geometrically over 1..n, always ending at n."""
    if n <= 0:
        return []
    return np.unique(np.geomspace(1, n, num=min(points, n)).round().astype(np.int64)).tolist()


def frequency_tolerance(p, count, sigma=None):
    """sigma * sqrt(p (1 - p) / count)."""
    if sigma is None:
        sigma = cantordim_setting("SIGMA")
    return sigma * math.sqrt(p * (1.0 - p) / count)
