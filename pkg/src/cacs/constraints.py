"""Constraint specifications, satisfaction checks and domain propagators.

Propagators are pure: they take a mapping from variable to
:class:`~cacs.domain.DomainSet` and return a new mapping over the
constraint's scope.  A propagator that proves its constraint unsatisfiable
returns empty domains for the whole scope instead of raising.

Filtering strength per kind:

* ``NOT_EQUAL``: arc consistency.
* ``ALL_DIFFERENT``: iterated singleton elimination plus a pigeonhole test.
* ``LESS_OR_EQUAL`` / ``GREATER_OR_EQUAL`` / ``LINEAR_LESS``: bounds
  reasoning, which is exact for linear inequalities.
* ``ARITH_EQUAL``: bound consistency, iterated to a local fixpoint.
* ``CUMULATIVE``: time-table filtering on compulsory parts.
"""

from __future__ import annotations

import enum
from collections import deque
from dataclasses import dataclass
from typing import Hashable, Iterable, Mapping, Sequence

from .domain import EMPTY, DomainSet

Var = Hashable
Domains = Mapping[Var, DomainSet]


class Kind(enum.Enum):
    NOT_EQUAL = "notequal"
    ALL_DIFFERENT = "alldiff"
    LESS_OR_EQUAL = "lessorequal"
    GREATER_OR_EQUAL = "greaterorequal"
    LINEAR_LESS = "linearless"
    ARITH_EQUAL = "aritheq"
    CUMULATIVE = "cumulative"


class ConstraintError(ValueError):
    """Malformed constraint specification."""


class IncompleteAssignmentError(KeyError):
    """An assignment is missing a value for a scope variable."""


@dataclass(frozen=True)
class ConstraintSpec:
    """Declarative constraint over an ordered scope of variables.

    ``coeffs``/``constant``/``strict`` are used by the linear kinds: the
    constraint reads ``sum(coeffs[i] * scope[i]) < constant`` (``<=`` when
    ``strict`` is false) for ``LINEAR_LESS`` and ``... == constant`` for
    ``ARITH_EQUAL``.  ``efforts``/``capacity`` belong to ``CUMULATIVE``, whose
    scope is all task starts followed by all task ends.
    """

    kind: Kind
    scope: tuple
    coeffs: tuple[int, ...] = ()
    constant: int = 0
    strict: bool = False
    efforts: tuple[int, ...] = ()
    capacity: int = 0

    def __post_init__(self) -> None:
        scope = self.scope
        if not scope:
            raise ConstraintError("constraint scope must be non-empty")
        if len(set(scope)) != len(scope):
            raise ConstraintError(f"duplicate variable in scope {scope!r}")
        k = self.kind
        if k in (Kind.NOT_EQUAL, Kind.LESS_OR_EQUAL, Kind.GREATER_OR_EQUAL):
            if len(scope) != 2:
                raise ConstraintError(f"{k.name} requires exactly 2 variables")
        elif k is Kind.ALL_DIFFERENT:
            if len(scope) < 2:
                raise ConstraintError("ALL_DIFFERENT requires at least 2 variables")
        elif k in (Kind.LINEAR_LESS, Kind.ARITH_EQUAL):
            if len(self.coeffs) != len(scope):
                raise ConstraintError("one coefficient per scope variable required")
            if any(c == 0 for c in self.coeffs):
                raise ConstraintError("zero coefficient in linear constraint")
        elif k is Kind.CUMULATIVE:
            n = len(self.efforts)
            if len(scope) != 2 * n or n == 0:
                raise ConstraintError("CUMULATIVE scope must be N starts then N ends")
            if any(w < 0 for w in self.efforts) or self.capacity < 0:
                raise ConstraintError("efforts and capacity must be non-negative")

    def __str__(self) -> str:
        names = [str(v) for v in self.scope]
        k = self.kind
        if k is Kind.NOT_EQUAL:
            return f"{names[0]} != {names[1]}"
        if k is Kind.LESS_OR_EQUAL:
            return f"{names[0]} <= {names[1]}"
        if k is Kind.GREATER_OR_EQUAL:
            return f"{names[0]} >= {names[1]}"
        if k is Kind.ALL_DIFFERENT:
            return f"alldifferent({', '.join(names)})"
        if k in (Kind.LINEAR_LESS, Kind.ARITH_EQUAL):
            lhs = " + ".join(f"{c}*{n}" for c, n in zip(self.coeffs, names))
            op = "==" if k is Kind.ARITH_EQUAL else ("<" if self.strict else "<=")
            return f"{lhs} {op} {self.constant}"
        n = len(self.efforts)
        return f"cumulative(tasks={n}, capacity={self.capacity})"


# -- constructors -----------------------------------------------------------


def not_equal(a: Var, b: Var) -> ConstraintSpec:
    return ConstraintSpec(Kind.NOT_EQUAL, (a, b))


def all_different(*variables: Var) -> ConstraintSpec:
    if len(variables) == 1 and isinstance(variables[0], (list, tuple)):
        variables = tuple(variables[0])
    return ConstraintSpec(Kind.ALL_DIFFERENT, tuple(variables))


def less_or_equal(a: Var, b: Var) -> ConstraintSpec:
    return ConstraintSpec(Kind.LESS_OR_EQUAL, (a, b))


def greater_or_equal(a: Var, b: Var) -> ConstraintSpec:
    return ConstraintSpec(Kind.GREATER_OR_EQUAL, (a, b))


def _linear_terms(terms, rhs) -> tuple[tuple, tuple[int, ...], int]:
    scope, coeffs = [], []
    for term in terms:
        if isinstance(term, tuple) and len(term) == 2 and isinstance(term[0], int):
            coef, var = term
        else:
            coef, var = 1, term
        scope.append(var)
        coeffs.append(coef)
    constant = 0
    if isinstance(rhs, int):
        constant = rhs
    else:
        scope.append(rhs)
        coeffs.append(-1)
    return tuple(scope), tuple(coeffs), constant


def linear_less(terms: Iterable, rhs, strict: bool = True) -> ConstraintSpec:
    """``sum(terms) < rhs`` (or ``<=`` when not strict).

    ``terms`` holds variables or ``(coef, var)`` pairs; ``rhs`` is a variable
    or an integer constant.
    """
    scope, coeffs, constant = _linear_terms(terms, rhs)
    return ConstraintSpec(Kind.LINEAR_LESS, scope, coeffs, constant, strict)


def arith_equal(terms: Iterable, rhs) -> ConstraintSpec:
    """``sum(terms) == rhs``; see :func:`linear_less` for the argument shapes."""
    scope, coeffs, constant = _linear_terms(terms, rhs)
    return ConstraintSpec(Kind.ARITH_EQUAL, scope, coeffs, constant)


def difference_equal(a: Var, b: Var, c: Var) -> ConstraintSpec:
    """``a - b == c``."""
    return ConstraintSpec(Kind.ARITH_EQUAL, (a, b, c), (1, -1, -1), 0)


def cumulative(
    starts: Sequence[Var], ends: Sequence[Var], efforts: Sequence[int], capacity: int
) -> ConstraintSpec:
    if not (len(starts) == len(ends) == len(efforts)):
        raise ConstraintError("starts, ends and efforts must have equal length")
    return ConstraintSpec(
        Kind.CUMULATIVE,
        tuple(starts) + tuple(ends),
        efforts=tuple(int(w) for w in efforts),
        capacity=int(capacity),
    )


# -- satisfaction -----------------------------------------------------------


def check(c: ConstraintSpec, assignment: Mapping[Var, int]) -> bool:
    try:
        vals = [assignment[v] for v in c.scope]
    except KeyError as exc:
        raise IncompleteAssignmentError(
            f"no value for {exc.args[0]!r} in scope of {c}"
        ) from None
    k = c.kind
    if k is Kind.NOT_EQUAL:
        return vals[0] != vals[1]
    if k is Kind.ALL_DIFFERENT:
        return len(set(vals)) == len(vals)
    if k is Kind.LESS_OR_EQUAL:
        return vals[0] <= vals[1]
    if k is Kind.GREATER_OR_EQUAL:
        return vals[0] >= vals[1]
    if k is Kind.LINEAR_LESS:
        total = sum(a * x for a, x in zip(c.coeffs, vals))
        return total < c.constant if c.strict else total <= c.constant
    if k is Kind.ARITH_EQUAL:
        return sum(a * x for a, x in zip(c.coeffs, vals)) == c.constant
    return _cumulative_holds(c, vals)


def _cumulative_holds(c: ConstraintSpec, vals: Sequence[int]) -> bool:
    n = len(c.efforts)
    events: dict[int, int] = {}
    for s, e, w in zip(vals[:n], vals[n:], c.efforts):
        if e > s and w:
            events[s] = events.get(s, 0) + w
            events[e] = events.get(e, 0) - w
    load = 0
    for t in sorted(events):
        load += events[t]
        if load > c.capacity:
            return False
    return True


# -- propagation ------------------------------------------------------------


def _failed(c: ConstraintSpec) -> dict:
    return {v: EMPTY for v in c.scope}


def propagate(c: ConstraintSpec, domains: Domains) -> dict:
    """Reduce the scope domains of ``c``; never adds values."""
    doms = [domains[v] for v in c.scope]
    if any(not d for d in doms):
        return _failed(c)
    k = c.kind
    if k is Kind.NOT_EQUAL:
        out = _prop_not_equal(doms)
    elif k is Kind.ALL_DIFFERENT:
        out = _prop_all_different(doms)
    elif k is Kind.LESS_OR_EQUAL:
        out = _prop_linear(doms, (1, -1), 0, False)
    elif k is Kind.GREATER_OR_EQUAL:
        out = _prop_linear(doms, (-1, 1), 0, False)
    elif k is Kind.LINEAR_LESS:
        out = _prop_linear(doms, c.coeffs, c.constant, c.strict)
    elif k is Kind.ARITH_EQUAL:
        out = _prop_equal(doms, c.coeffs, c.constant)
    else:
        out = _prop_cumulative(doms, c.efforts, c.capacity)
    if out is None or any(not d for d in out):
        return _failed(c)
    return dict(zip(c.scope, out))


def _prop_not_equal(doms):
    a, b = doms
    if len(a) == 1:
        b = b.without(a.min)
    if len(b) == 1:
        a = a.without(b.min)
    return [a, b]


def _prop_all_different(doms):
    doms = list(doms)
    n = len(doms)
    seen: set[int] = set()
    changed = True
    while changed:
        changed = False
        for i, d in enumerate(doms):
            if len(d) != 1 or i in seen:
                continue
            seen.add(i)
            v = d.min
            for j in range(n):
                if j != i and v in doms[j]:
                    doms[j] = doms[j].without(v)
                    if not doms[j]:
                        return None
                    changed = True
    union: set[int] = set()
    for d in doms:
        union.update(d.values)
    if len(union) < n:
        return None
    return doms


def _term_range(coef: int, d: DomainSet) -> tuple[int, int]:
    if coef > 0:
        return coef * d.min, coef * d.max
    return coef * d.max, coef * d.min


def _ceil_div(a: int, b: int) -> int:
    return -(-a // b)


def _prop_linear(doms, coeffs, constant, strict):
    # sum(c_i x_i) <= bound
    bound = constant - 1 if strict else constant
    mins = [_term_range(c, d)[0] for c, d in zip(coeffs, doms)]
    total_min = sum(mins)
    if total_min > bound:
        return None
    out = []
    for c, d, m in zip(coeffs, doms, mins):
        slack = bound - (total_min - m)  # c * x <= slack
        if c > 0:
            out.append(d.within(d.min, slack // c))
        else:
            out.append(d.within(_ceil_div(slack, c), d.max))
    return out


def _prop_equal(doms, coeffs, constant):
    doms = list(doms)
    while True:
        ranges = [_term_range(c, d) for c, d in zip(coeffs, doms)]
        lo_sum = sum(r[0] for r in ranges)
        hi_sum = sum(r[1] for r in ranges)
        if lo_sum > constant or hi_sum < constant:
            return None
        changed = False
        for i, (c, d) in enumerate(zip(coeffs, doms)):
            lo_i, hi_i = ranges[i]
            # c * x in [constant - (hi_sum - hi_i), constant - (lo_sum - lo_i)]
            t_lo = constant - (hi_sum - hi_i)
            t_hi = constant - (lo_sum - lo_i)
            if c > 0:
                lo, hi = _ceil_div(t_lo, c), t_hi // c
            else:
                lo, hi = _ceil_div(t_hi, c), t_lo // c
            nd = d.within(lo, hi)
            if not nd:
                return None
            if len(nd) != len(d):
                doms[i] = nd
                changed = True
        if not changed:
            return doms


def _prop_cumulative(doms, efforts, capacity):
    n = len(efforts)
    starts, ends = list(doms[:n]), list(doms[n:])
    while True:
        # compulsory part of task i: [latest start, earliest end)
        parts = []
        profile: dict[int, int] = {}
        for i in range(n):
            lst, eet = starts[i].max, ends[i].min
            parts.append((lst, eet))
            if efforts[i] and lst < eet:
                for t in range(lst, eet):
                    profile[t] = profile.get(t, 0) + efforts[i]
        if any(load > capacity for load in profile.values()):
            return None
        changed = False
        for i in range(n):
            w = efforts[i]
            if not w:
                continue
            lst, eet = parts[i]

            def others(t: int) -> int:
                own = w if lst <= t < eet else 0
                return profile.get(t, 0) - own

            def overloaded(lo: int, hi: int) -> bool:
                return any(others(t) + w > capacity for t in range(lo, hi))

            # start s forces the task over at least [s, earliest end)
            keep_s = [s for s in starts[i] if not overloaded(s, eet)]
            # end e forces the task over at least [latest start, e)
            keep_e = [e for e in ends[i] if not overloaded(lst, e)]
            if len(keep_s) != len(starts[i]) or len(keep_e) != len(ends[i]):
                if not keep_s or not keep_e:
                    return None
                starts[i], ends[i] = DomainSet(keep_s), DomainSet(keep_e)
                changed = True
                break
        if not changed:
            return starts + ends


def fixpoint_propagate(
    cs: Sequence[ConstraintSpec], domains: Domains, changed: Iterable[Var] | None = None
) -> dict:
    """Apply every constraint until no domain changes.

    With ``changed`` given, only constraints watching those variables are
    scheduled initially (the input is assumed to be a fixpoint otherwise).
    """
    result = dict(domains)
    watchers: dict[Var, list[int]] = {}
    for idx, c in enumerate(cs):
        for v in c.scope:
            watchers.setdefault(v, []).append(idx)
    if changed is None:
        queue = deque(range(len(cs)))
    else:
        queue = deque(sorted({i for v in changed for i in watchers.get(v, ())}))
    queued = set(queue)
    while queue:
        idx = queue.popleft()
        queued.discard(idx)
        c = cs[idx]
        reduced = propagate(c, result)
        for v, d in reduced.items():
            if d != result[v]:
                result[v] = d
                for other in watchers[v]:
                    if other not in queued:
                        queue.append(other)
                        queued.add(other)
    return result
