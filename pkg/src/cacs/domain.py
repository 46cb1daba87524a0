"""Finite integer domains.

A :class:`DomainSet` is an immutable, ascending set of integers.  The empty
domain is an ordinary value: it is how the protocol carries "no solution
possible" between agents.
"""

from __future__ import annotations

import enum
from typing import Iterable, Iterator


class InvalidRangeError(ValueError):
    """Raised when a range is requested with ``inf > sup``."""


class DomainStatus(enum.Enum):
    EMPTY = "empty"
    SINGLETON = "singleton"
    PLURAL = "plural"


class DomainSet:
    """Immutable finite set of integers kept in ascending order."""

    __slots__ = ("_values", "_set")

    def __init__(self, values: Iterable[int] = ()):
        members = frozenset(int(v) for v in values)
        self._set = members
        self._values = tuple(sorted(members))

    @property
    def values(self) -> tuple[int, ...]:
        return self._values

    def __iter__(self) -> Iterator[int]:
        return iter(self._values)

    def __len__(self) -> int:
        return len(self._values)

    def __contains__(self, value: object) -> bool:
        return value in self._set

    def __bool__(self) -> bool:
        return bool(self._values)

    def __eq__(self, other: object) -> bool:
        if isinstance(other, DomainSet):
            return self._set == other._set
        if isinstance(other, (set, frozenset)):
            return self._set == other
        return NotImplemented

    def __hash__(self) -> int:
        return hash(self._set)

    def __le__(self, other: DomainSet) -> bool:
        return self._set <= other._set

    def __lt__(self, other: DomainSet) -> bool:
        return self._set < other._set

    def __and__(self, other: DomainSet) -> DomainSet:
        return intersect(self, other)

    def __repr__(self) -> str:
        return f"DomainSet({format_domain(self)})"

    @property
    def min(self) -> int:
        if not self._values:
            raise ValueError("empty domain has no minimum")
        return self._values[0]

    @property
    def max(self) -> int:
        if not self._values:
            raise ValueError("empty domain has no maximum")
        return self._values[-1]

    def within(self, lo: int, hi: int) -> DomainSet:
        """Values of this domain lying in the closed interval ``[lo, hi]``."""
        if self._values and lo <= self._values[0] and self._values[-1] <= hi:
            return self
        return DomainSet(v for v in self._values if lo <= v <= hi)

    def without(self, value: int) -> DomainSet:
        if value not in self._set:
            return self
        return DomainSet(v for v in self._values if v != value)


EMPTY = DomainSet()


def intersect(a: DomainSet, b: DomainSet) -> DomainSet:
    if a._set <= b._set:
        return a
    if b._set <= a._set:
        return b
    return DomainSet(a._set & b._set)


def bounded_range(inf: int, sup: int) -> DomainSet:
    if inf > sup:
        raise InvalidRangeError(f"invalid range: inf={inf} > sup={sup}")
    return DomainSet(range(inf, sup + 1))


def classify(d: DomainSet) -> DomainStatus:
    n = len(d)
    if n == 0:
        return DomainStatus.EMPTY
    if n == 1:
        return DomainStatus.SINGLETON
    return DomainStatus.PLURAL


def format_domain(d: DomainSet) -> str:
    """Compact text form: ``{}``, ``{3}``, ``{0,1,2}`` or ``{1..100}`` for runs."""
    vals = d.values
    if not vals:
        return "{}"
    if len(vals) > 3 and vals[-1] - vals[0] == len(vals) - 1:
        return "{%d..%d}" % (vals[0], vals[-1])
    return "{" + ",".join(str(v) for v in vals) + "}"
