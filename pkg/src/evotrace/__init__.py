"""Instrumented multi-objective evolutionary optimization and analysis."""

from .core import (
    GenerationRecord,
    Individual,
    MatingPair,
    MutationEvent,
    Origin,
    ProblemSpec,
    QualityPoint,
    RunConfig,
    RunLog,
    SelectionGroup,
    SelectionMember,
    SelectionRecord,
    dominates,
    origin_in_generation,
    validate_run_log,
)
from .engine import make_run_config, operator_config, resume_run, run
from .operators import (
    MatingStrategy,
    OperatorConfig,
    SelectionStrategy,
    crowding_distance,
    environmental_select,
    fast_nondominated_sort,
    hv_contribution,
    mate,
    polynomial_mutation,
    sbx_crossover,
)
from .problems import evaluate, get_problem, random_population, sample_reference_set

__version__ = "0.1.0"

__all__ = [
    "GenerationRecord",
    "Individual",
    "MatingPair",
    "MatingStrategy",
    "MutationEvent",
    "OperatorConfig",
    "Origin",
    "ProblemSpec",
    "QualityPoint",
    "RunConfig",
    "RunLog",
    "SelectionGroup",
    "SelectionMember",
    "SelectionRecord",
    "SelectionStrategy",
    "crowding_distance",
    "dominates",
    "environmental_select",
    "evaluate",
    "fast_nondominated_sort",
    "get_problem",
    "hv_contribution",
    "make_run_config",
    "mate",
    "operator_config",
    "origin_in_generation",
    "polynomial_mutation",
    "random_population",
    "resume_run",
    "run",
    "sample_reference_set",
    "sbx_crossover",
    "validate_run_log",
]
