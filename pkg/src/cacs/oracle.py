"""Brute-force ground truth for small instances.

Nothing here calls into :mod:`cacs.constraints` check or propagate code or
into the engine; constraint semantics are re-derived from the
:class:`~cacs.constraints.ConstraintSpec` fields so that agreement between
the two is meaningful.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Mapping, Optional

from .constraints import ConstraintSpec, Kind
from .domain import DomainSet
from .model import DcspProblem

DEFAULT_CAP = 10**7


class InstanceTooLargeError(ValueError):
    pass


@dataclass
class OracleResult:
    satisfiable: bool
    witness: Optional[dict] = None
    lex_min: bool = False
    nodes_visited: int = 0
    solutions: Optional[int] = field(default=None, repr=False)


def satisfied(c: ConstraintSpec, values: Mapping) -> bool:
    """Definitional truth value of ``c`` under a full assignment."""
    t = [values[v] for v in c.scope]
    kind = c.kind
    if kind is Kind.NOT_EQUAL:
        return not t[0] == t[1]
    if kind is Kind.ALL_DIFFERENT:
        return all(a != b for a, b in itertools.combinations(t, 2))
    if kind is Kind.LESS_OR_EQUAL:
        return not t[0] > t[1]
    if kind is Kind.GREATER_OR_EQUAL:
        return not t[0] < t[1]
    if kind is Kind.LINEAR_LESS:
        lhs = 0
        for a, x in zip(c.coeffs, t):
            lhs += a * x
        return lhs - c.constant < 0 if c.strict else lhs - c.constant <= 0
    if kind is Kind.ARITH_EQUAL:
        lhs = 0
        for a, x in zip(c.coeffs, t):
            lhs += a * x
        return lhs == c.constant
    if kind is Kind.CUMULATIVE:
        n = len(c.efforts)
        starts, ends = t[:n], t[n:]
        if n == 0:
            return True
        lo, hi = min(starts), max(ends)
        for instant in range(lo, hi):
            load = sum(
                w for s, e, w in zip(starts, ends, c.efforts) if s <= instant < e
            )
            if load > c.capacity:
                return False
        return True
    raise ValueError(f"unknown constraint kind {kind}")


def _check_cap(sizes, cap: int) -> None:
    total = math.prod(sizes) if sizes else 1
    if total > cap:
        raise InstanceTooLargeError(
            f"search space of {total} assignments exceeds cap {cap}"
        )


def brute_force(p: DcspProblem, lex_min: bool = True, cap: int = DEFAULT_CAP) -> OracleResult:
    """Enumerate original domains in priority-then-creation order, ascending.

    The first satisfying tuple found is the lexicographic minimum in that
    variable order.
    """
    order = [v for va in p.vagents for v in va.variables]
    doms = {v: d for va in p.vagents for v, d in va.variables.items()}
    _check_cap([len(doms[v]) for v in order], cap)
    constraints = [c for ca in p.cagents for c in ca.constraints]
    nodes = 0
    for combo in itertools.product(*(sorted(doms[v].values) for v in order)):
        nodes += 1
        values = dict(zip(order, combo))
        if all(satisfied(c, values) for c in constraints):
            return OracleResult(True, values, lex_min, nodes)
    return OracleResult(False, None, lex_min, nodes)


def count_solutions(p: DcspProblem, cap: int = DEFAULT_CAP) -> int:
    order = [v for va in p.vagents for v in va.variables]
    doms = {v: d for va in p.vagents for v, d in va.variables.items()}
    _check_cap([len(doms[v]) for v in order], cap)
    constraints = [c for ca in p.cagents for c in ca.constraints]
    return sum(
        1
        for combo in itertools.product(*(doms[v].values for v in order))
        if all(satisfied(c, dict(zip(order, combo))) for c in constraints)
    )


def supported_values(
    c: ConstraintSpec, domains: Mapping, cap: int = DEFAULT_CAP
) -> dict:
    """Per scope variable, the values occurring in some satisfying tuple."""
    scope = list(c.scope)
    _check_cap([len(domains[v]) for v in scope], cap)
    support: dict = {v: set() for v in scope}
    for combo in itertools.product(*(domains[v].values for v in scope)):
        if satisfied(c, dict(zip(scope, combo))):
            for v, x in zip(scope, combo):
                support[v].add(x)
    return {v: DomainSet(s) for v, s in support.items()}


def propagation_support_check(
    c: ConstraintSpec, domains: Mapping, removed, cap: int = DEFAULT_CAP
) -> bool:
    """True iff removing ``removed = (variable, value)`` is sound.

    A removal is sound when no tuple from ``domains`` that satisfies ``c``
    gives ``variable`` that ``value``.
    """
    var, value = removed
    scope = list(c.scope)
    _check_cap([len(domains[v]) for v in scope if v != var], cap)
    pools = [DomainSet((value,)) if v == var else domains[v] for v in scope]
    if value not in domains[var]:
        return True
    for combo in itertools.product(*(d.values for d in pools)):
        if satisfied(c, dict(zip(scope, combo))):
            return False
    return True
