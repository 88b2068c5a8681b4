# closed_form/instances.py
import logging

import numpy as np

from core.types import validate_stochastic

from .recursion import check_feasibility

logger = logging.getLogger(__name__)


def random_feasible_instance(rng, max_base=10, min_slack=0.05, max_tries=10_000):
    """
    Draw (alpha, d) with largest base L <= max_base and every level slack >= min_slack.

    d is Dirichlet over bases 2..L; alpha is the d-weighted column marginal of a
    random matrix with Dirichlet rows, so alpha always comes from some P in pi.
    """
    for _ in range(max_tries):
        L = int(rng.integers(2, max_base + 1))
        weights = rng.dirichlet(np.full(L - 1, 2.0))
        marginal = np.zeros(L)
        for n, w in zip(range(2, L + 1), weights):
            marginal[:n] += w * rng.dirichlet(np.full(n, 2.0))

        d = validate_stochastic({n: float(w) for n, w in zip(range(2, L + 1), weights)})
        alpha = validate_stochastic({j: float(a) for j, a in enumerate(marginal)})
        report = check_feasibility(alpha, d)
        if report.feasible and min(report.slack.values(), default=np.inf) >= min_slack:
            return alpha, d
    raise RuntimeError(f"No instance with slack >= {min_slack} after {max_tries} draws")
