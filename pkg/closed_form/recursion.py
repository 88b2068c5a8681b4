# closed_form/recursion.py
"""
Construction of the optimal frequency matrix P^alpha.

Given digit frequencies alpha (support inside 0..L-1) and base frequencies d
(support inside 2..L), the recursion builds A_n and alpha_j^(n) level by level:

    alpha_j^(j0+1) = alpha_j0,   A_{j0+1} = alpha_j0
    alpha_j^(n)    = alpha_j^(n-1) * (1 - d_{n-1} / A_{n-1})   for j < n - 1
    alpha_{n-1}^(n) = alpha_{n-1}
    A_n            = sum_{j=j0}^{n-1} alpha_j^(n)

and from it r_n, t_j with p_{n,j} = r_n * t_j. Products of the factors
(1 - d_k / A_k) are accumulated as sums of logarithms.
"""
import logging
import math
from dataclasses import dataclass
from types import MappingProxyType
from typing import Mapping, Optional

import numpy as np

from core.conf import cantordim_setting
from core.exceptions import DegenerateLevel, Infeasible, SupportMismatch
from core.types import FrequencyMatrix

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class FeasibilityReport:
    """
    slack[m] for j0 + 2 <= m <= L is sum_{k>=m} d_k - sum_{j>=m-1} alpha_j,
    the room left for digits >= m-1 once bases >= m are used up.
    A base n <= j0 carrying mass gets slack[n] = -d_n.
    tail_sums[n] = A_n = sum_{k>=n} d_k - sum_{j>=n} alpha_j for j0 < n <= L.
    """
    feasible: bool
    violated_level: Optional[int]
    slack: Mapping[int, float]
    tail_sums: Mapping[int, float]
    j0: int
    L: int


@dataclass(frozen=True)
class RecursionTable:
    j0: int
    L: int
    A: Mapping[int, float]
    alpha_stage: Mapping[tuple, float]
    r: Mapping[int, float]
    t: Mapping[int, float]
    log_r: Mapping[int, float]
    log_t: Mapping[int, float]


def _check_supports(alpha, d):
    for n in d.support:
        if n < 2:
            raise SupportMismatch(n, f"Base frequency at n={n}, bases start at 2")
    L = d.support_max
    for j in alpha.support:
        if j >= L:
            raise SupportMismatch(j, f"Digit {j} has mass but the largest base is {L}")
    return L


def check_feasibility(alpha, d, tol=None):
    if tol is None:
        tol = cantordim_setting("TOLERANCE")
    L = _check_supports(alpha, d)
    j0 = alpha.first_positive

    slack = {}
    for n in d.support:
        if n <= j0:
            slack[n] = -d[n]
    for m in range(j0 + 2, L + 1):
        slack[m] = d.mass_from(m) - alpha.mass_from(m - 1)

    tail_sums = {n: d.mass_from(n) - alpha.mass_from(n) for n in range(j0 + 1, L + 1)}

    violated = next((m for m in sorted(slack) if slack[m] <= tol), None)
    if violated is not None:
        logger.debug("Level %d violated, slack %r", violated, slack[violated])

    return FeasibilityReport(
        feasible=violated is None,
        violated_level=violated,
        slack=MappingProxyType(slack),
        tail_sums=MappingProxyType(tail_sums),
        j0=j0,
        L=L,
    )


def lemma_recursion(alpha, d, tol=None):
    if tol is None:
        tol = cantordim_setting("TOLERANCE")
    report = check_feasibility(alpha, d, tol)
    if not report.feasible:
        level = report.violated_level
        if abs(report.slack[level]) <= tol and level > report.j0:
            raise DegenerateLevel(level - 1)
        raise Infeasible(report)

    j0, L = report.j0, report.L
    A = {}
    stage = {}
    log_factor = {}
    current = [alpha[j0]]
    for n in range(j0 + 1, L + 1):
        if n > j0 + 1:
            ratio = d[n - 1] / A[n - 1]
            if 1.0 - ratio <= tol:
                raise DegenerateLevel(n - 1)
            log_factor[n - 1] = math.log1p(-ratio)
            factor = 1.0 - ratio
            current = [v * factor for v in current] + [alpha[n - 1]]
        for offset, value in enumerate(current):
            stage[(n, j0 + offset)] = value
        A[n] = math.fsum(current)
        logger.debug("Level %d: A_n=%r", n, A[n])

    # log of prod_{k=j0+1}^{m} (1 - d_k / A_k), empty product at m = j0
    log_prefix = {j0: 0.0}
    running = []
    for m in range(j0 + 1, L):
        running.append(log_factor.get(m, 0.0))
        log_prefix[m] = math.fsum(running)

    log_r = {n: log_prefix[n - 1] - math.log(A[n]) for n in range(j0 + 1, L + 1)}
    log_t = {}
    for j in range(j0, L):
        log_t[j] = math.log(alpha[j]) - log_prefix[j] if alpha[j] > 0 else -math.inf

    return RecursionTable(
        j0=j0,
        L=L,
        A=MappingProxyType(A),
        alpha_stage=MappingProxyType(stage),
        r=MappingProxyType({n: math.exp(v) for n, v in log_r.items()}),
        t=MappingProxyType({j: math.exp(v) for j, v in log_t.items()}),
        log_r=MappingProxyType(log_r),
        log_t=MappingProxyType(log_t),
    )


def optimal_matrix(table):
    """
    P^alpha: p_{n,j} = r_n t_j for n > j0 and j >= j0, zero for j < j0;
    rows with n <= j0 are uniform.
    """
    rows = {}
    for n in range(2, table.L + 1):
        if n <= table.j0:
            rows[n] = np.full(n, 1.0 / n)
            continue
        row = np.zeros(n)
        for j in range(table.j0, n):
            row[j] = table.r[n] * table.t[j]
        rows[n] = row
    return FrequencyMatrix(rows)
