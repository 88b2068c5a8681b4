# variational/kifer.py
"""
Certification that P^alpha attains the supremum of the dimension over pi(alpha).

Two independent checks against the closed form:
- the numerical solvers of solvers.py must reach the same objective;
- random members of pi(alpha) around P^alpha must never exceed it.

Random members are P^alpha plus a combination of elementary moves. A move
(n1, n2, j1, j2) adds +1/d_n1 at (n1, j1), -1/d_n1 at (n1, j2),
-1/d_n2 at (n2, j1) and +1/d_n2 at (n2, j2): row sums and d-weighted column
sums are unchanged.
"""
import logging
import math
from dataclasses import dataclass
from itertools import combinations
from types import MappingProxyType
from typing import Mapping

import numpy as np

from closed_form.formulas import dim_closed_form, dim_peyriere
from core.conf import cantordim_setting
from core.exceptions import CounterexampleFound, NoInteriorPoint

from .solvers import METHODS, SolverConfig, solve_variational

logger = logging.getLogger(__name__)

CONCAVITY_NOTE = (
    "The objective is strictly concave on the polytope pi(alpha); a stationary "
    "point in its relative interior is the unique global maximizer."
)


@dataclass(frozen=True)
class MethodCheck:
    method: str
    objective: float
    gap: float
    iterations: int
    residuals: Mapping[str, float]
    converged: bool


@dataclass(frozen=True)
class KiferReport:
    """
    gap = objective - closed_form for every solver run; max_gap is the largest
    dim_peyriere(P) - closed_form over the sampled P.
    """
    closed_form: float
    checks: tuple
    sample_count: int
    moves: int
    max_sampled_dimension: float
    max_gap: float
    seed: int
    solver_tol: float
    sample_tol: float
    certificate: str = CONCAVITY_NOTE

    @property
    def passed(self):
        solvers_ok = all(c.converged and abs(c.gap) <= self.solver_tol for c in self.checks)
        return solvers_ok and self.max_gap <= self.sample_tol


def elementary_moves(alpha, d):
    """All (n1, n2, j1, j2) with n1 < n2 in the support of d, j1 < j2 < n1 and alpha_j1, alpha_j2 > 0."""
    bases = d.support
    moves = []
    for n1, n2 in combinations(bases, 2):
        digits = [j for j in range(n1) if alpha[j] > 0]
        for j1, j2 in combinations(digits, 2):
            moves.append((n1, n2, j1, j2))
    return moves


def _move_direction(move, d):
    n1, n2, j1, j2 = move
    return {
        (n1, j1): 1.0 / d[n1],
        (n1, j2): -1.0 / d[n1],
        (n2, j1): -1.0 / d[n2],
        (n2, j2): 1.0 / d[n2],
    }


def _max_step(P, direction):
    """Largest eps with P + eps * direction >= 0."""
    limits = [P.entry(n, j) / -v for (n, j), v in direction.items() if v < 0]
    return min(limits, default=math.inf)


def sample_pi_alpha(alpha, d, count, seed, scale=1.0):
    """
    Draw `count` members of pi(alpha) near P^alpha.

    Each sample adds a normal combination of the admissible elementary moves,
    scaled by scale * U(0, 0.9) of the largest step keeping every entry >= 0.
    Moves touching a zero entry of P^alpha are skipped.
    """
    P = dim_closed_form(alpha, d).optimal_matrix
    candidates = elementary_moves(alpha, d)
    moves = [m for m in candidates if all(P.entry(n, j) > 0 for n, j in _move_direction(m, d))]
    if candidates and not moves:
        raise NoInteriorPoint()
    if len(moves) < len(candidates):
        logger.warning("Skipped %d moves blocked by zero entries", len(candidates) - len(moves))

    if not moves or scale == 0:
        return [P] * count

    rng = np.random.default_rng(seed)
    directions = [_move_direction(m, d) for m in moves]
    samples = []
    for _ in range(count):
        coefficients = rng.standard_normal(len(moves))
        combined = {}
        for c, direction in zip(coefficients, directions):
            for cell, v in direction.items():
                combined[cell] = combined.get(cell, 0.0) + c * v

        rows = {n: np.zeros(n) for n in P.bases}
        for (n, j), v in combined.items():
            rows[n][j] = v
        step = scale * rng.uniform(0.0, 0.9) * _max_step(P, combined)
        samples.append(P.perturbed(rows, step))
    return samples


def verify_kifer(alpha, d, count=500, seed=0, cfg=None, methods=METHODS):
    """
    Compare the closed form with every solver method and with `count` samples of pi(alpha).

    Raises CounterexampleFound if a sample beats the closed form by more than
    KIFER_SAMPLE_TOL; NotConverged from a solver propagates.
    """
    cfg = cfg or SolverConfig()
    sample_tol = cantordim_setting("KIFER_SAMPLE_TOL")
    closed = dim_closed_form(alpha, d).dimension

    checks = []
    for method in methods:
        run_cfg = SolverConfig(method=method, tol=cfg.tol, max_iter=cfg.max_iter, seed=cfg.seed, init=cfg.init, step=cfg.step)
        result = solve_variational(alpha, d, run_cfg)
        checks.append(MethodCheck(
            method=method,
            objective=result.objective,
            gap=result.objective - closed,
            iterations=result.iterations,
            residuals=MappingProxyType(dict(result.residuals)),
            converged=result.converged,
        ))
        logger.info("%s: objective %r, gap %.3e after %d iterations", method, result.objective, result.objective - closed, result.iterations)

    max_dimension = -math.inf
    for P in sample_pi_alpha(alpha, d, count, seed):
        value = dim_peyriere(P, d)
        gap = value - closed
        if gap > sample_tol:
            raise CounterexampleFound(P, gap)
        max_dimension = max(max_dimension, value)

    return KiferReport(
        closed_form=closed,
        checks=tuple(checks),
        sample_count=count,
        moves=len(elementary_moves(alpha, d)),
        max_sampled_dimension=max_dimension,
        max_gap=max_dimension - closed if count else -math.inf,
        seed=seed,
        solver_tol=cantordim_setting("KIFER_SOLVER_TOL"),
        sample_tol=sample_tol,
    )
