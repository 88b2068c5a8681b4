# core/exceptions.py
"""
Every error raised by the cantordim apps.

Library code raises these; only the ``cantordim`` management command turns
them into exit codes.
"""


class CantorDimError(Exception):
    """Base class for all cantordim errors."""


# ═══════════════════════════════════════════════════════════════
# ✅ VALIDATION
# ═══════════════════════════════════════════════════════════════

class ValidationError(CantorDimError):
    """Input does not satisfy a domain-type invariant."""


class NegativeEntry(ValidationError):
    def __init__(self, index):
        self.index = index
        super().__init__(f"Negative probability at index {index}")


class SumNotOne(ValidationError):
    def __init__(self, actual_sum):
        self.actual_sum = actual_sum
        super().__init__(f"Entries sum to {actual_sum!r}, expected 1")


class EmptySupport(ValidationError):
    def __init__(self):
        super().__init__("Stochastic vector has no entries")


class InvalidIndex(ValidationError):
    def __init__(self, index):
        self.index = index
        super().__init__(f"Index {index!r} is not a nonnegative integer")


class InvalidBase(ValidationError):
    def __init__(self, base):
        self.base = base
        super().__init__(f"Base {base!r} is not an integer >= 2")


class InvalidMatrixRow(ValidationError):
    def __init__(self, base, reason):
        self.base = base
        self.reason = reason
        super().__init__(f"Row for base {base}: {reason}")


class InvalidDigitString(ValidationError):
    def __init__(self, position, digit, base):
        self.position = position
        self.digit = digit
        self.base = base
        super().__init__(f"Digit {digit} at position {position} is impossible in base {base}")


class IrrationalFrequency(ValidationError):
    def __init__(self, index):
        self.index = index
        super().__init__(f"Frequency of base {index} is not a usable rational")


class DenominatorTooLarge(ValidationError):
    def __init__(self, q):
        self.q = q
        super().__init__(f"Common denominator {q} exceeds the configured limit")


class SupportMismatch(CantorDimError):
    def __init__(self, index, message=None):
        self.index = index
        super().__init__(message or f"Unexpected mass at index {index}")


class EmptyDenominator(CantorDimError):
    def __init__(self):
        super().__init__("Sum of d_n log n vanishes")


# ═══════════════════════════════════════════════════════════════
# 📐 CLOSED FORM
# ═══════════════════════════════════════════════════════════════

class Infeasible(CantorDimError):
    def __init__(self, report):
        self.report = report
        super().__init__(f"Infeasible frequencies, violated level {report.violated_level}")


class DegenerateLevel(CantorDimError):
    def __init__(self, level):
        self.level = level
        super().__init__(f"1 - d_k/A_k vanishes at level k={level}")


# ═══════════════════════════════════════════════════════════════
# 🔢 EXPANSION / SAMPLING
# ═══════════════════════════════════════════════════════════════

class OutOfRange(CantorDimError):
    def __init__(self, x):
        self.x = x
        super().__init__(f"x={x} is outside [0, 1)")


class ZeroMeasurePrefix(CantorDimError):
    def __init__(self, depth):
        self.depth = depth
        super().__init__(f"Cylinder prefix of depth {depth} has measure zero")


# ═══════════════════════════════════════════════════════════════
# 🧮 VARIATIONAL
# ═══════════════════════════════════════════════════════════════

class NotConverged(CantorDimError):
    def __init__(self, iterations, residuals, result=None):
        self.iterations = iterations
        self.residuals = residuals
        self.result = result
        super().__init__(f"Solver stopped after {iterations} iterations, residuals {residuals}")


class NoInteriorPoint(CantorDimError):
    def __init__(self):
        super().__init__("Every perturbation of P^alpha is blocked by a zero entry")


class CounterexampleFound(CantorDimError):
    def __init__(self, matrix, gap):
        self.matrix = matrix
        self.gap = gap
        super().__init__(f"Sampled matrix exceeds the closed form by {gap:.3e}")


# ═══════════════════════════════════════════════════════════════
# 💻 INSTANCE FILES
# ═══════════════════════════════════════════════════════════════

class InstanceError(CantorDimError):
    def __init__(self, message, field=None, line=None):
        self.field = field
        self.line = line
        where = []
        if line is not None:
            where.append(f"line {line}")
        if field:
            where.append(f"field '{field}'")
        prefix = f"{', '.join(where)}: " if where else ""
        super().__init__(f"{prefix}{message}")


class MissingPattern(InstanceError):
    def __init__(self):
        super().__init__("sampling needs a concrete base pattern", field="pattern")
