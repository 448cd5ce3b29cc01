"""Counting Skolem functions of Boolean specifications F(X, Y)."""

from .counting import CountResult, ExactCounter, HashCounter, count_g
from .estimator import (LogCount, Outcome, ParamSet, RunStats, baseline, brute_force_skolem_count,
                        derive_params, skolemfc, stopping_rule)
from .formula import Cnf, FormatError, ProjectedFormula, Specification, load_spec, parse_spec, validate
from .limits import Budget, ResourceLimitExceeded
from .sampling import ExactSampler, HashSampler
from .transform import build_g, cofactor

__all__ = [
    "Budget", "Cnf", "CountResult", "ExactCounter", "ExactSampler", "FormatError", "HashCounter",
    "HashSampler", "LogCount", "Outcome", "ParamSet", "ProjectedFormula", "ResourceLimitExceeded",
    "RunStats", "Specification", "baseline", "brute_force_skolem_count", "build_g", "cofactor",
    "count_g", "derive_params", "load_spec", "parse_spec", "skolemfc", "stopping_rule", "validate",
]
