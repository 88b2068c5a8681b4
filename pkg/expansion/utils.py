# expansion/utils.py
"""
Cantor series expansions over a periodic base sequence.

x = sum_i eps_i / (b_1 ... b_i) with 0 <= eps_i <= b_i - 1.
"""
import logging
import math
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from numbers import Integral
from types import MappingProxyType
from typing import Mapping, Optional, Union

import numpy as np

from core.conf import cantordim_setting
from core.exceptions import InvalidDigitString, OutOfRange
from core.types import BasePattern, FrequencyMatrix

logger = logging.getLogger(__name__)


# ═══════════════════════════════════════════════════════════════
# 🔢 DIGIT STRINGS
# ═══════════════════════════════════════════════════════════════

@dataclass(frozen=True)
class DigitString:
    """eps_1 ... eps_n over the bases b_1 ... b_n of `pattern`."""
    digits: tuple
    pattern: BasePattern

    def __post_init__(self):
        digits = tuple(int(e) for e in self.digits)
        for position, (digit, base) in enumerate(zip(digits, self.pattern.bases(len(digits))), start=1):
            if not 0 <= digit < base:
                raise InvalidDigitString(position, digit, int(base))
        object.__setattr__(self, "digits", digits)

    def __len__(self):
        return len(self.digits)

    @property
    def depth(self):
        return len(self.digits)

    @property
    def bases(self):
        return self.pattern.bases(len(self.digits))

    def prefix(self, n):
        return DigitString(self.digits[:n], self.pattern)

    def extend(self, digit):
        return DigitString(self.digits + (digit,), self.pattern)


@dataclass(frozen=True)
class FrequencyStats:
    """
    Counts at depth n:
    tau[j] = tau_j(x, n), tau_joint[(k, j)] = tau_{k,j}(x, n), base_counts[k] = D_k(n).
    """
    n: int
    tau: Mapping[int, int]
    tau_joint: Mapping[tuple, int]
    base_counts: Mapping[int, int]

    def frequencies(self):
        """tau_j(x, n) / n."""
        if self.n == 0:
            return {}
        return {j: c / self.n for j, c in self.tau.items()}


@dataclass(frozen=True)
class Cylinder:
    """
    C(eps_1, ..., eps_n) = [left, left + length).
    Beyond the exact depth only `log_length` is meaningful and `length` is None.
    """
    depth: int
    left: Union[Fraction, float]
    length: Optional[Fraction]
    log_length: float

    @property
    def is_exact(self):
        return self.length is not None

    @property
    def right(self):
        if self.is_exact:
            return self.left + self.length
        return self.left + math.exp(self.log_length)


# ═══════════════════════════════════════════════════════════════
# ➡️ EXPANSION / EVALUATION
# ═══════════════════════════════════════════════════════════════

def _as_ratio(x):
    if isinstance(x, Fraction):
        return x.numerator, x.denominator
    if isinstance(x, Integral) and not isinstance(x, bool):
        return int(x), 1
    if isinstance(x, float):
        if not math.isfinite(x):
            raise OutOfRange(x)
        return x.as_integer_ratio()
    raise TypeError(f"Cannot expand {type(x).__name__}")


def expand(x, pattern, n):
    """
    First n Cantor digits of x in [0, 1), greedy (floor) convention.

    The remainder is kept as an integer numerator over a fixed denominator,
    so each step is one multiplication and one divmod.
    """
    num, den = _as_ratio(x)
    if num < 0 or num >= den:
        raise OutOfRange(x)
    if n < 0:
        raise ValueError("Depth must be nonnegative")

    digits = []
    for base in pattern.bases(n).tolist():
        digit, num = divmod(num * base, den)
        digits.append(digit)
    return DigitString(tuple(digits), pattern)


def evaluate(s):
    """sum eps_i / (b_1 ... b_i) as a double, Horner from the last digit backwards."""
    value = 0.0
    for digit, base in zip(reversed(s.digits), reversed(s.bases.tolist())):
        value = (digit + value) / base
    return value


def evaluate_exact(s):
    """Same sum as an exact Fraction."""
    num, den = 0, 1
    for digit, base in zip(s.digits, s.bases.tolist()):
        num = num * base + digit
        den *= base
    return Fraction(num, den)


def cylinder(s, exact_depth=None):
    if exact_depth is None:
        exact_depth = cantordim_setting("EXACT_CYLINDER_DEPTH")
    bases = s.bases
    log_length = -math.fsum(np.log(bases.astype(float))) if len(s) else 0.0
    if len(s) <= exact_depth:
        return Cylinder(
            depth=len(s),
            left=evaluate_exact(s),
            length=Fraction(1, math.prod(bases.tolist())),
            log_length=log_length,
        )
    return Cylinder(depth=len(s), left=evaluate(s), length=None, log_length=log_length)


# ═══════════════════════════════════════════════════════════════
# 📊 FREQUENCY STATISTICS
# ═══════════════════════════════════════════════════════════════

def digit_stats(s):
    bases = s.bases.tolist()
    tau = Counter(s.digits)
    joint = Counter(zip(bases, s.digits))
    base_counts = Counter(bases)
    return FrequencyStats(
        n=len(s),
        tau=MappingProxyType(dict(sorted(tau.items()))),
        tau_joint=MappingProxyType(dict(sorted(joint.items()))),
        base_counts=MappingProxyType(dict(sorted(base_counts.items()))),
    )


def empirical_matrix(stats):
    """P-hat with p_{k,j} = tau_{k,j} / D_k for every base seen in the string."""
    rows = {}
    for k, count in stats.base_counts.items():
        row = np.zeros(k)
        for j in range(k):
            row[j] = stats.tau_joint.get((k, j), 0)
        rows[k] = row / count
    return FrequencyMatrix(rows)
