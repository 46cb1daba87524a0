"""Seeded random instances for fuzzing and the ``verify --random`` command."""

from __future__ import annotations

import random
from typing import Sequence

from .constraints import ConstraintSpec, Kind, cumulative
from .domain import DomainSet
from .model import DcspProblem, ValueOrder

XML_KINDS = (
    Kind.NOT_EQUAL,
    Kind.ALL_DIFFERENT,
    Kind.LESS_OR_EQUAL,
    Kind.GREATER_OR_EQUAL,
    Kind.LINEAR_LESS,
    Kind.ARITH_EQUAL,
)
ALL_KINDS = XML_KINDS + (Kind.CUMULATIVE,)


def random_constraint(
    rng: random.Random, variables: Sequence, kinds: Sequence[Kind] = ALL_KINDS,
    max_arity: int = 4,
) -> ConstraintSpec:
    variables = list(variables)
    usable = [
        k for k in kinds
        if len(variables) >= (1 if k in (Kind.LINEAR_LESS, Kind.ARITH_EQUAL) else 2)
    ]
    kind = rng.choice(usable)
    top = min(max_arity, len(variables))
    if kind in (Kind.NOT_EQUAL, Kind.LESS_OR_EQUAL, Kind.GREATER_OR_EQUAL):
        return ConstraintSpec(kind, tuple(rng.sample(variables, 2)))
    if kind is Kind.ALL_DIFFERENT:
        return ConstraintSpec(kind, tuple(rng.sample(variables, rng.randint(2, top))))
    if kind in (Kind.LINEAR_LESS, Kind.ARITH_EQUAL):
        scope = tuple(rng.sample(variables, rng.randint(1, top)))
        coeffs = tuple(rng.choice((-3, -2, -1, 1, 2, 3)) for _ in scope)
        return ConstraintSpec(
            kind, scope, coeffs, rng.randint(-4, 8),
            strict=kind is Kind.LINEAR_LESS and rng.random() < 0.5,
        )
    n = rng.randint(1, top // 2)
    scope = rng.sample(variables, 2 * n)
    efforts = [rng.randint(0, 3) for _ in range(n)]
    return cumulative(scope[:n], scope[n:], efforts, rng.randint(0, 4))


def random_domain(rng: random.Random, lo: int = -3, hi: int = 5, max_size: int = 5) -> DomainSet:
    size = rng.randint(1, max_size)
    return DomainSet(rng.sample(range(lo, hi + 1), size))


def random_problem(
    seed: int,
    max_vars: int = 4,
    max_domain: int = 5,
    max_constraints: int = 4,
    kinds: Sequence[Kind] = ALL_KINDS,
    random_orders: bool = False,
) -> DcspProblem:
    """Small sealed problem with interval domains and random grouping."""
    rng = random.Random(seed)
    p = DcspProblem(f"random-{seed}")
    n_vars = rng.randint(1, max_vars)
    n_agents = rng.randint(1, n_vars)
    agents = [p.make_vagent(f"a{i}") for i in range(n_agents)]
    variables = []
    for i in range(n_vars):
        owner = agents[i] if i < n_agents else rng.choice(agents)
        inf = rng.randint(-2, 3)
        sup = inf + rng.randint(0, max_domain - 1)
        variables.append(p.make_bounded_int_var(owner, f"x{i}", inf, sup))
    n_cons = rng.randint(0, max_constraints)
    constraints = [random_constraint(rng, variables, kinds) for _ in range(n_cons)]
    if constraints:
        n_ctrl = rng.randint(1, len(constraints))
        ctrls = [p.make_cagent(f"c{i}") for i in range(n_ctrl)]
        slots = list(range(n_ctrl)) + [rng.randrange(n_ctrl) for _ in constraints[n_ctrl:]]
        for c, slot in zip(constraints, slots):
            p.post(ctrls[slot], c)
    if random_orders:
        for a in agents:
            p.set_value_order(a, rng.choice((ValueOrder.ASCENDING, ValueOrder.DESCENDING)))
    return p.seal()
