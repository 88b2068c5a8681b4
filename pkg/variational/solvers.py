# variational/solvers.py
"""
Numerical maximization of the d-weighted row entropy over pi(alpha):

    maximize   -sum_n d_n sum_j p_{n,j} log p_{n,j}
    subject to sum_j p_{n,j} = 1              (n in the support of d)
               sum_n d_n p_{n,j} = alpha_j    (every digit j)

Variables live on the lattice {(n, j): j < n, alpha_j > 0}; cells in columns
with alpha_j = 0 are fixed to zero up front.

Two methods:
- ipf: scale columns to the alpha marginal, then renormalize rows
  (Sinkhorn scaling of q_{n,j} = d_n p_{n,j}).
- mirror_descent: entropic mirror ascent on the Lagrangian. The row step is
  x <- x^(1 - eta) * exp(eta * lambda), renormalized per row; the column
  prices then move by log(alpha_j) - log(c_j).
"""
import logging
import math
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Mapping

import numpy as np
from scipy.special import entr, logsumexp

from closed_form.formulas import dim_peyriere, lyapunov_denominator
from closed_form.recursion import check_feasibility
from core.conf import cantordim_setting
from core.exceptions import Infeasible, NotConverged, ValidationError
from core.types import FrequencyMatrix

logger = logging.getLogger(__name__)

METHODS = ("ipf", "mirror_descent")
INITIALIZATIONS = ("uniform", "random")


@dataclass(frozen=True)
class SolverConfig:
    method: str = field(default_factory=lambda: cantordim_setting("SOLVER_METHOD"))
    tol: float = field(default_factory=lambda: cantordim_setting("SOLVER_TOL"))
    max_iter: int = field(default_factory=lambda: cantordim_setting("SOLVER_MAX_ITER"))
    seed: int = 0
    init: str = "uniform"
    step: float = field(default_factory=lambda: cantordim_setting("MIRROR_STEP"))

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValidationError(f"Unknown solver method {self.method!r}, expected one of {METHODS}")
        if self.init not in INITIALIZATIONS:
            raise ValidationError(f"Unknown initialization {self.init!r}")
        if not self.tol > 0:
            raise ValidationError("Solver tolerance must be positive")
        if self.max_iter < 1:
            raise ValidationError("max_iter must be at least 1")
        if not 0 < self.step <= 1:
            raise ValidationError("Mirror step must lie in (0, 1]")


@dataclass(frozen=True)
class SolverResult:
    matrix: FrequencyMatrix
    objective: float
    iterations: int
    residuals: Mapping[str, float]
    converged: bool
    method: str
    history: tuple = ()


@dataclass(frozen=True)
class Lattice:
    """Dense view of the problem: one row per base in the support of d."""
    bases: tuple
    weights: np.ndarray
    target: np.ndarray
    mask: np.ndarray

    @classmethod
    def build(cls, alpha, d):
        bases = d.support
        width = d.support_max
        target = alpha.as_array(width)
        active = target > 0
        mask = np.array([[j < n and active[j] for j in range(width)] for n in bases])
        weights = np.array([d[n] for n in bases])
        return cls(bases, weights, target, mask)

    def uniform(self):
        return self.mask / self.mask.sum(axis=1, keepdims=True)

    def random_product_form(self, rng):
        t = rng.uniform(0.5, 1.5, size=self.target.size)
        x = self.mask * t
        return x / x.sum(axis=1, keepdims=True)

    def from_matrix(self, P):
        x = np.zeros(self.mask.shape)
        for i, n in enumerate(self.bases):
            x[i, :n] = P.row(n)
        return np.where(self.mask, x, 0.0)

    def to_matrix(self, x, all_bases):
        rows = {}
        for n in all_bases:
            rows[n] = np.full(n, 1.0 / n)
        for i, n in enumerate(self.bases):
            rows[n] = x[i, :n].copy()
        return FrequencyMatrix(rows)

    def residuals(self, x):
        row = float(np.max(np.abs(x.sum(axis=1) - 1.0)))
        column = float(np.max(np.abs(self.weights @ x - self.target)))
        return row, column


def _objective(x, weights, denominator):
    return math.fsum(weights * entr(x).sum(axis=1)) / denominator


def _ipf_step(lattice, x, state):
    column_mass = lattice.weights @ x
    scale = np.divide(lattice.target, column_mass, out=np.zeros_like(column_mass), where=column_mass > 0)
    x = x * scale
    return x / x.sum(axis=1, keepdims=True)


def _mirror_step(lattice, x, state):
    eta = state["step"]
    with np.errstate(divide="ignore", invalid="ignore"):
        log_x = np.where(lattice.mask, (1.0 - eta) * np.log(x) + eta * state["prices"], -np.inf)
    log_x -= logsumexp(log_x, axis=1, keepdims=True)
    x = np.exp(log_x)
    column_mass = lattice.weights @ x
    active = lattice.target > 0
    state["prices"][active] += np.log(lattice.target[active]) - np.log(column_mass[active])
    return x


STEPS = {"ipf": _ipf_step, "mirror_descent": _mirror_step}


def solve_variational(alpha, d, cfg=None, initial=None, callback=None):
    """
    Maximize the entropy objective over pi(alpha).

    Stops when the row residual, the weighted column residual and the change of
    the objective are all <= cfg.tol. Raises NotConverged (carrying the last
    SolverResult) when max_iter is reached first.
    """
    cfg = cfg or SolverConfig()
    report = check_feasibility(alpha, d)
    if not report.feasible:
        raise Infeasible(report)

    lattice = Lattice.build(alpha, d)
    denominator = lyapunov_denominator(d)
    if initial is not None:
        x = lattice.from_matrix(initial)
    elif cfg.init == "random":
        x = lattice.random_product_form(np.random.default_rng(cfg.seed))
    else:
        x = lattice.uniform()

    step = STEPS[cfg.method]
    state = {"step": cfg.step, "prices": np.zeros(lattice.target.size)}
    previous = None
    history = []
    residuals = {}
    converged = False
    iteration = 0
    for iteration in range(1, cfg.max_iter + 1):
        x = step(lattice, x, state)
        objective = _objective(x, lattice.weights, denominator)
        row, column = lattice.residuals(x)
        delta = math.inf if previous is None else abs(objective - previous)
        previous = objective
        residuals = {"row": row, "column": column, "objective_delta": delta}
        history.append(max(row, column))
        if callback is not None:
            callback(iteration, x)
        if iteration % 1000 == 0:
            logger.debug("%s iteration %d: residuals %s", cfg.method, iteration, residuals)
        if max(row, column, delta) <= cfg.tol:
            converged = True
            break

    matrix = lattice.to_matrix(x, range(2, d.support_max + 1))
    result = SolverResult(
        matrix=matrix,
        objective=dim_peyriere(matrix, d),
        iterations=iteration,
        residuals=MappingProxyType(residuals),
        converged=converged,
        method=cfg.method,
        history=tuple(history),
    )
    if not converged:
        logger.warning("%s did not converge in %d iterations: %s", cfg.method, iteration, residuals)
        raise NotConverged(iteration, dict(residuals), result)
    return result
