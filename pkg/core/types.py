# core/types.py
"""
Validated domain types shared by every app:

- StochasticVector: finite-support probability vector (alpha over digits, d over bases)
- BasePattern: one period of a periodic base sequence A = {b_n}
- FrequencyMatrix: row-stochastic matrix P = (p_{n,j}), one row per base n

All three are immutable once built. Absent indices mean exactly zero.
"""
import logging
import math
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Integral, Real
from types import MappingProxyType
from typing import Mapping, Optional

import numpy as np

from .conf import cantordim_setting
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
    ValidationError,
)

logger = logging.getLogger(__name__)


def _is_index(value):
    return isinstance(value, Integral) and not isinstance(value, bool)


def _is_exact(value):
    return isinstance(value, (Fraction, Integral)) and not isinstance(value, bool)


# ═══════════════════════════════════════════════════════════════
# 🎲 STOCHASTIC VECTORS
# ═══════════════════════════════════════════════════════════════

@dataclass(frozen=True)
class StochasticVector:
    """
    Finite-support stochastic vector.
    `entries` holds doubles; `exact` additionally keeps rational values when
    the vector was built from exact input (pattern counts, "1/3" strings).
    """
    entries: Mapping[int, float]
    exact: Optional[Mapping[int, Fraction]] = None

    def __post_init__(self):
        object.__setattr__(self, "entries", MappingProxyType(dict(sorted(self.entries.items()))))
        if self.exact is not None:
            object.__setattr__(self, "exact", MappingProxyType(dict(sorted(self.exact.items()))))

    def __getitem__(self, index):
        return self.entries.get(index, 0.0)

    def __iter__(self):
        return iter(self.entries)

    def items(self):
        return self.entries.items()

    @property
    def support(self):
        """Indices carrying positive mass, ascending."""
        return tuple(i for i, v in self.entries.items() if v > 0)

    @property
    def support_max(self):
        """Largest index with a positive entry (the L of the recursion when this is d)."""
        return self.support[-1]

    @property
    def first_positive(self):
        """Smallest index with a positive entry (j0 when this is alpha)."""
        return self.support[0]

    @property
    def is_exact(self):
        return self.exact is not None

    def as_array(self, length):
        """Dense copy of entries 0..length-1."""
        out = np.zeros(length)
        for i, v in self.entries.items():
            if i < length:
                out[i] = v
        return out

    def mass_from(self, start):
        """Sum of entries with index >= start."""
        return math.fsum(v for i, v in self.entries.items() if i >= start)


def validate_stochastic(raw, tol=None):
    """
    Check a raw index -> probability map and wrap it as a StochasticVector.
    Never renormalizes: the sum must already be within `tol` of 1.
    """
    if tol is None:
        tol = cantordim_setting("TOLERANCE")
    if not raw:
        raise EmptySupport()

    entries = {}
    exact = {}
    all_exact = True
    for index, value in raw.items():
        if not _is_index(index) or index < 0:
            raise InvalidIndex(index)
        if not isinstance(value, Real) or isinstance(value, bool):
            raise ValidationError(f"Entry at index {index} is not a real number: {value!r}")
        if not math.isfinite(float(value)):
            raise ValidationError(f"Entry at index {index} is not finite")
        if value < 0:
            raise NegativeEntry(index)
        entries[int(index)] = float(value)
        if _is_exact(value):
            exact[int(index)] = Fraction(value)
        else:
            all_exact = False

    if not any(v > 0 for v in entries.values()):
        raise EmptySupport()

    if all_exact:
        total = sum(exact.values(), Fraction(0))
        if abs(total - 1) > tol:
            raise SumNotOne(float(total))
    else:
        total = math.fsum(entries.values())
        if abs(total - 1.0) > tol:
            raise SumNotOne(total)

    return StochasticVector(entries, exact if all_exact else None)


def point_mass(index):
    """The stochastic vector delta_index."""
    return StochasticVector({index: 1.0}, {index: Fraction(1)})


# ═══════════════════════════════════════════════════════════════
# 🔁 BASE PATTERNS
# ═══════════════════════════════════════════════════════════════

@dataclass(frozen=True)
class BasePattern:
    """One period of the base sequence; b_n = pattern[(n - 1) % period_length]."""
    pattern: tuple

    def __post_init__(self):
        pattern = tuple(self.pattern)
        if not pattern:
            raise ValidationError("Base pattern is empty")
        for b in pattern:
            if not _is_index(b) or b < 2:
                raise InvalidBase(b)
        object.__setattr__(self, "pattern", tuple(int(b) for b in pattern))

    @property
    def period_length(self):
        return len(self.pattern)

    def base_at(self, position):
        """b_position, positions counted from 1."""
        return self.pattern[(position - 1) % self.period_length]

    def bases(self, n):
        """b_1, ..., b_n as an integer array."""
        return np.resize(np.asarray(self.pattern, dtype=np.int64), n)

    def base_counts(self, n):
        """D_k(n) for every base k of the pattern."""
        full, rest = divmod(n, self.period_length)
        period = Counter(self.pattern)
        head = Counter(self.pattern[:rest])
        return {k: full * c + head.get(k, 0) for k, c in sorted(period.items())}

    def exact_frequencies(self):
        """d_k = count_k / period_length as exact rationals."""
        counts = Counter(self.pattern)
        return {k: Fraction(c, self.period_length) for k, c in sorted(counts.items())}


def base_frequencies_from_pattern(pattern):
    """The base frequencies d of a periodic base sequence, exact and as doubles."""
    exact = pattern.exact_frequencies()
    return StochasticVector({k: float(v) for k, v in exact.items()}, exact)


def _as_fraction(index, value, limit):
    if isinstance(value, Fraction):
        return value
    frac = Fraction(value).limit_denominator(limit)
    if abs(float(frac) - value) > 1e-12:
        raise IrrationalFrequency(index)
    return frac


def pattern_from_frequencies(d, limit=None):
    """
    Build a period realizing the rational base frequencies d.

    The period has length Q (common denominator) and holds Q*d_k copies of k.
    Each slot goes to the base with the largest deficit i*d_k - placed_k,
    ties to the smallest base, so |D_k(n) - n*d_k| stays below the number of
    distinct bases at every n.
    """
    if limit is None:
        limit = cantordim_setting("DENOMINATOR_LIMIT")

    source = d.exact if d.is_exact else d.entries
    fractions = {}
    for k, v in source.items():
        if v == 0:
            continue
        if k < 2:
            raise InvalidBase(k)
        fractions[k] = _as_fraction(k, v, limit)

    if sum(fractions.values(), Fraction(0)) != 1:
        raise SumNotOne(float(sum(fractions.values(), Fraction(0))))

    q = math.lcm(*(f.denominator for f in fractions.values()))
    if q > limit:
        raise DenominatorTooLarge(q)

    bases = sorted(fractions)
    counts = {k: int(fractions[k] * q) for k in bases}
    placed = dict.fromkeys(bases, 0)
    pattern = []
    for i in range(1, q + 1):
        # deficits scaled by q to stay in integers
        best = max(bases, key=lambda k: (i * counts[k] - placed[k] * q, -k))
        placed[best] += 1
        pattern.append(best)

    logger.debug("Pattern of period %d for bases %s", q, bases)
    return BasePattern(tuple(pattern))


# ═══════════════════════════════════════════════════════════════
# 🧮 FREQUENCY MATRICES
# ═══════════════════════════════════════════════════════════════

@dataclass(frozen=True)
class FrequencyMatrix:
    """
    P = (p_{n,j}): row n is a probability vector over digits 0..n-1.
    Digits j >= n do not exist in base n and read as 0.
    """
    rows: Mapping[int, np.ndarray]
    tol: float = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        tol = self.tol if self.tol is not None else cantordim_setting("TOLERANCE")
        checked = {}
        for n, row in sorted(self.rows.items()):
            if not _is_index(n) or n < 2:
                raise InvalidBase(n)
            arr = np.array(row, dtype=float)
            if arr.shape != (n,):
                raise InvalidMatrixRow(n, f"expected {n} entries, got {arr.size}")
            if not np.all(np.isfinite(arr)) or np.any(arr < 0):
                raise InvalidMatrixRow(n, "entries must be finite and nonnegative")
            total = math.fsum(arr)
            if abs(total - 1.0) > tol:
                raise InvalidMatrixRow(n, f"row sums to {total!r}")
            arr.flags.writeable = False
            checked[int(n)] = arr
        object.__setattr__(self, "rows", MappingProxyType(checked))
        object.__setattr__(self, "tol", tol)

    @classmethod
    def uniform(cls, bases):
        return cls({n: np.full(n, 1.0 / n) for n in bases})

    @property
    def bases(self):
        return tuple(self.rows)

    def row(self, n):
        return self.rows[n]

    def entry(self, n, j):
        if j >= n:
            return 0.0
        return float(self.rows[n][j])

    def column_marginal(self, d):
        """j -> sum_n d_n p_{n,j}; every base with d_n > 0 needs a row."""
        width = max(d.support_max, 1)
        total = np.zeros(width)
        for n in d.support:
            if n not in self.rows:
                raise SupportMismatch(n, f"No row for base {n} although d_{n} > 0")
            total[:n] += d[n] * self.rows[n]
        return {j: float(v) for j, v in enumerate(total)}

    def perturbed(self, direction, step):
        """P + step * direction, validated again."""
        rows = {n: self.rows[n] + step * np.asarray(direction.get(n, 0.0)) for n in self.rows}
        return FrequencyMatrix(rows, tol=self.tol)

    def as_lists(self):
        return {n: row.tolist() for n, row in self.rows.items()}

    def __eq__(self, other):
        if not isinstance(other, FrequencyMatrix):
            return NotImplemented
        return self.bases == other.bases and all(
            np.array_equal(self.rows[n], other.rows[n]) for n in self.bases
        )

