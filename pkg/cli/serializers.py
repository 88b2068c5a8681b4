# cli/serializers.py
"""
Reports to plain JSON-ready dicts, every float rounded to OUTPUT_DIGITS
significant digits, and back.
"""
import csv
import math
from types import MappingProxyType

import numpy as np

from closed_form.formulas import DimensionReport
from closed_form.recursion import RecursionTable
from core.conf import cantordim_setting
from core.types import FrequencyMatrix, StochasticVector


def num(x):
    x = float(x)
    if not math.isfinite(x):
        return x
    return float(f"{x:.{cantordim_setting('OUTPUT_DIGITS')}g}")


def number_map(values):
    return {str(k): num(v) for k, v in values.items()}


def _unmap(values):
    return {int(k): float(v) for k, v in values.items()}


def vector_to_dict(v):
    return number_map(v.entries)


def matrix_to_dict(P):
    return {str(n): [num(x) for x in row] for n, row in P.rows.items()}


# ═══════════════════════════════════════════════════════════════
# 📐 CLOSED FORM
# ═══════════════════════════════════════════════════════════════

def recursion_to_dict(table):
    return {
        "j0": table.j0,
        "L": table.L,
        "A": number_map(table.A),
        "alpha_stage": [[n, j, num(v)] for (n, j), v in table.alpha_stage.items()],
        "r": number_map(table.r),
        "t": number_map(table.t),
        "log_r": number_map(table.log_r),
        "log_t": number_map(table.log_t),
    }


def report_to_dict(report):
    return {
        "dimension": num(report.dimension),
        "numerator": num(report.numerator_entropy),
        "denominator": num(report.denominator_lyapunov),
        "is_full_dimension": report.is_full_dimension,
        "alpha": vector_to_dict(report.alpha),
        "d": vector_to_dict(report.d),
        "optimal_matrix": matrix_to_dict(report.optimal_matrix),
        "recursion": recursion_to_dict(report.recursion),
    }


def report_from_dict(data):
    rec = data["recursion"]
    table = RecursionTable(
        j0=rec["j0"],
        L=rec["L"],
        A=MappingProxyType(_unmap(rec["A"])),
        alpha_stage=MappingProxyType({(n, j): float(v) for n, j, v in rec["alpha_stage"]}),
        r=MappingProxyType(_unmap(rec["r"])),
        t=MappingProxyType(_unmap(rec["t"])),
        log_r=MappingProxyType(_unmap(rec["log_r"])),
        log_t=MappingProxyType(_unmap(rec["log_t"])),
    )
    matrix = FrequencyMatrix({int(n): np.array(row) for n, row in data["optimal_matrix"].items()}, tol=1e-12)
    return DimensionReport(
        dimension=float(data["dimension"]),
        numerator_entropy=float(data["numerator"]),
        denominator_lyapunov=float(data["denominator"]),
        optimal_matrix=matrix,
        recursion=table,
        alpha=StochasticVector(_unmap(data["alpha"])),
        d=StochasticVector(_unmap(data["d"])),
    )


def feasibility_to_dict(report):
    return {
        "feasible": report.feasible,
        "violated_level": report.violated_level,
        "j0": report.j0,
        "L": report.L,
        "slack": number_map(report.slack),
        "tail_sums": number_map(report.tail_sums),
    }


# ═══════════════════════════════════════════════════════════════
# 🧮 VERIFICATION
# ═══════════════════════════════════════════════════════════════

def check_to_dict(check):
    return {
        "method": check.method,
        "objective": num(check.objective),
        "gap": num(check.gap),
        "iterations": check.iterations,
        "residuals": number_map(check.residuals),
        "converged": check.converged,
    }


def kifer_to_dict(report):
    return {
        "closed_form": num(report.closed_form),
        "methods": [check_to_dict(c) for c in report.checks],
        "sample_count": report.sample_count,
        "moves": report.moves,
        "seed": report.seed,
        "max_sampled_dimension": num(report.max_sampled_dimension),
        "max_gap": num(report.max_gap),
        "solver_tol": report.solver_tol,
        "sample_tol": report.sample_tol,
        "certificate": report.certificate,
        "passed": report.passed,
    }


def history_to_list(history, points=100):
    """At most `points` entries of a residual history, always keeping the last one."""
    if len(history) <= points:
        return [num(h) for h in history]
    picks = np.unique(np.linspace(0, len(history) - 1, num=points).round().astype(int))
    return [[int(i) + 1, num(history[i])] for i in picks]


# ═══════════════════════════════════════════════════════════════
# 📈 TRACES / EXPANSIONS
# ═══════════════════════════════════════════════════════════════

TRACE_HEADER = ("depth", "log_mu", "log_len", "ratio")


def write_trace(trace, handle):
    writer = csv.writer(handle, lineterminator="\n")
    writer.writerow(TRACE_HEADER)
    for depth, log_mu, log_len, ratio in trace.rows():
        writer.writerow((depth, repr(num(log_mu)), repr(num(log_len)), repr(num(ratio))))


def stats_to_dict(stats):
    return {
        "n": stats.n,
        "tau": {str(j): c for j, c in stats.tau.items()},
        "frequencies": number_map(stats.frequencies()),
        "tau_joint": {f"{k},{j}": c for (k, j), c in stats.tau_joint.items()},
        "base_counts": {str(k): c for k, c in stats.base_counts.items()},
    }


def cylinder_to_dict(c):
    out = {
        "depth": c.depth,
        "left": num(c.left),
        "right": num(c.right),
        "log_length": num(c.log_length),
    }
    if c.is_exact:
        out["left_exact"] = str(c.left)
        out["length_exact"] = str(c.length)
    return out
