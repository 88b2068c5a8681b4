# core/conf.py
from django.conf import settings

DEFAULTS = {
    "TOLERANCE": 1e-12,
    "DENOMINATOR_LIMIT": 10**6,
    "EXACT_CYLINDER_DEPTH": 64,
    "SOLVER_METHOD": "ipf",
    "SOLVER_TOL": 1e-10,
    "SOLVER_MAX_ITER": 10**5,
    "MIRROR_STEP": 0.5,
    "KIFER_SAMPLE_TOL": 1e-9,
    "KIFER_SOLVER_TOL": 1e-6,
    "SIGMA": 4.0,
    "RNG_ALGORITHM": "PCG64",
    "OUTPUT_DIGITS": 15,
}


def cantordim_setting(name):
    """
    Read one numerical knob from settings.CANTORDIM.
    Falls back to DEFAULTS when Django is not configured (plain library use).
    """
    if settings.configured:
        overrides = getattr(settings, "CANTORDIM", {})
        if name in overrides:
            return overrides[name]
    return DEFAULTS[name]
