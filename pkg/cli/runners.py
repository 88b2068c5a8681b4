# cli/runners.py
"""
One function per sub-command. Each takes a parsed InstanceFile and returns an
Outcome: the exit code and the JSON-ready payload to print.

Exceptions from the computation apps are mapped to exit codes here so batch
runs can report every instance, including those handled in worker processes.
"""
import logging
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from tqdm import tqdm

from closed_form.formulas import dim_closed_form
from closed_form.recursion import check_feasibility
from core.conf import cantordim_setting
from core.exceptions import (
    CantorDimError,
    CounterexampleFound,
    DegenerateLevel,
    Infeasible,
    MissingPattern,
    NotConverged,
)
from core.types import pattern_from_frequencies
from expansion.utils import cylinder, digit_stats, expand
from measure_sampler.measure import CylinderMeasure, default_depths, pointwise_dimension_trace, sample_digits
from variational.kifer import verify_kifer

from . import serializers

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_INFEASIBLE = 2
EXIT_NOT_CONVERGED = 3


@dataclass
class Outcome:
    code: int
    payload: dict
    trace: Optional[object] = field(default=None, repr=False)


def _failure(code, error, **extra):
    return Outcome(code, {"success": False, "error": str(error), **extra})


def _infeasible_outcome(instance, error):
    problem = instance.to_problem()
    report = error.report if isinstance(error, Infeasible) else check_feasibility(problem.alpha, problem.d)
    return _failure(EXIT_INFEASIBLE, error, feasibility=serializers.feasibility_to_dict(report))


def guarded(runner, instance, **kwargs):
    """Run one sub-command and turn every domain error into an Outcome."""
    try:
        return runner(instance, **kwargs)
    except (Infeasible, DegenerateLevel) as e:
        return _infeasible_outcome(instance, e)
    except NotConverged as e:
        history = serializers.history_to_list(e.result.history) if e.result is not None else []
        return _failure(
            EXIT_NOT_CONVERGED, e,
            iterations=e.iterations,
            residuals=serializers.number_map(e.residuals),
            history=history,
        )
    except CounterexampleFound as e:
        return _failure(EXIT_NOT_CONVERGED, e, gap=serializers.num(e.gap), matrix=serializers.matrix_to_dict(e.matrix))
    except CantorDimError as e:
        return _failure(EXIT_INVALID, e)


# ═══════════════════════════════════════════════════════════════
# 💻 SUB-COMMANDS
# ═══════════════════════════════════════════════════════════════

def run_dim(instance):
    problem = instance.to_problem()
    report = dim_closed_form(problem.alpha, problem.d)
    return Outcome(EXIT_OK, {"success": True, **serializers.report_to_dict(report)})


def run_verify(instance, seed=None):
    problem = instance.to_problem()
    seed = instance.seed if seed is None else seed
    report = verify_kifer(problem.alpha, problem.d, count=instance.samples, seed=seed, cfg=instance.solver_config())
    code = EXIT_OK if report.passed else EXIT_NOT_CONVERGED
    return Outcome(code, {"success": report.passed, **serializers.kifer_to_dict(report)})


def run_sample(instance, n=None, seed=None):
    problem = instance.to_problem()
    if problem.pattern is None:
        raise MissingPattern()
    n = (instance.depth if instance.depth is not None else 10**4) if n is None else n
    seed = instance.seed if seed is None else seed

    report = dim_closed_form(problem.alpha, problem.d)
    measure = CylinderMeasure(report.optimal_matrix, problem.pattern)
    digits = sample_digits(measure, n, seed)
    trace = pointwise_dimension_trace(measure, digits, default_depths(n))
    stats = digit_stats(digits)
    payload = {
        "success": True,
        "n": n,
        "seed": seed,
        "rng": cantordim_setting("RNG_ALGORITHM"),
        "closed_form": serializers.num(report.dimension),
        "final_ratio": serializers.num(trace.ratio[-1]) if len(trace) else None,
        "digit_frequencies": serializers.number_map(stats.frequencies()),
        "alpha": serializers.vector_to_dict(problem.alpha),
    }
    return Outcome(EXIT_OK, payload, trace=trace)


def parse_point(text):
    """x as an exact rational: "5/6", "0.3" or "0"."""
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError):
        return float(text)


def run_expand(instance, x, n=None):
    """Digits of x over the instance pattern, or over a period realizing d when only d is given."""
    problem = instance.to_problem()
    pattern = problem.pattern or pattern_from_frequencies(problem.d)
    n = (instance.depth if instance.depth is not None else 16) if n is None else n
    digits = expand(x, pattern, n)
    payload = {
        "success": True,
        "x": str(x),
        "bases": digits.bases.tolist(),
        "digits": list(digits.digits),
        "stats": serializers.stats_to_dict(digit_stats(digits)),
        "cylinder": serializers.cylinder_to_dict(cylinder(digits)),
    }
    return Outcome(EXIT_OK, payload)


RUNNERS = {
    "dim": run_dim,
    "verify": run_verify,
    "sample": run_sample,
    "expand": run_expand,
}


# ═══════════════════════════════════════════════════════════════
# 📦 BATCH
# ═══════════════════════════════════════════════════════════════

def _run_named(args):
    name, instance, kwargs = args
    return guarded(RUNNERS[name], instance, **kwargs)


def run_batch(name, instances, workers=1, **kwargs):
    """Run one sub-command over several instances; results keep the input order."""
    jobs = [(name, instance, kwargs) for instance in instances]
    progress = dict(total=len(jobs), desc=name, file=sys.stderr, disable=len(jobs) < 2)
    if workers > 1 and len(jobs) > 1:
        logger.info("Running %d %s jobs on %d workers", len(jobs), name, workers)
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(tqdm(pool.map(_run_named, jobs), **progress))
    return [_run_named(job) for job in tqdm(jobs, **progress)]
