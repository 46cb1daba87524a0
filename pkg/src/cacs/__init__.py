"""Controller-agent distributed constraint satisfaction."""

from .constraints import (
    ConstraintSpec,
    Kind,
    all_different,
    arith_equal,
    check,
    cumulative,
    difference_equal,
    fixpoint_propagate,
    greater_or_equal,
    less_or_equal,
    linear_less,
    not_equal,
    propagate,
)
from .domain import DomainSet, DomainStatus, bounded_range, classify, intersect
from .engine import (
    ResultKind,
    SolveResult,
    StageOneKind,
    StageOneOutcome,
    run_domain_reduction,
    run_value_search,
    solve,
)
from .model import AgentId, DcspProblem, ValueOrder, VariableId, make_problem

__all__ = [
    "AgentId",
    "ConstraintSpec",
    "DcspProblem",
    "DomainSet",
    "DomainStatus",
    "Kind",
    "ResultKind",
    "SolveResult",
    "StageOneKind",
    "StageOneOutcome",
    "ValueOrder",
    "VariableId",
    "all_different",
    "arith_equal",
    "bounded_range",
    "check",
    "classify",
    "cumulative",
    "difference_equal",
    "fixpoint_propagate",
    "greater_or_equal",
    "intersect",
    "less_or_equal",
    "linear_less",
    "make_problem",
    "not_equal",
    "propagate",
    "run_domain_reduction",
    "run_value_search",
    "solve",
]
