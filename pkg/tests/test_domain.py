import pytest
from hypothesis import given, strategies as st

from cacs.domain import (
    EMPTY,
    DomainSet,
    DomainStatus,
    InvalidRangeError,
    bounded_range,
    classify,
    format_domain,
    intersect,
)

ints = st.frozensets(st.integers(-20, 20), max_size=12)


def test_bounded_range_is_inclusive():
    assert bounded_range(1, 3).values == (1, 2, 3)
    assert bounded_range(4, 4) == {4}


def test_bounded_range_rejects_inverted_bounds():
    with pytest.raises(InvalidRangeError):
        bounded_range(3, 1)


def test_classify():
    assert classify(EMPTY) is DomainStatus.EMPTY
    assert classify(DomainSet([7])) is DomainStatus.SINGLETON
    assert classify(bounded_range(0, 1)) is DomainStatus.PLURAL


def test_min_max_of_empty_raise():
    with pytest.raises(ValueError):
        EMPTY.min
    with pytest.raises(ValueError):
        EMPTY.max


def test_within_and_without():
    d = DomainSet([1, 3, 5, 7])
    assert d.within(2, 6) == {3, 5}
    assert d.within(0, 10) is d
    assert d.without(3) == {1, 5, 7}
    assert d.without(4) is d


@pytest.mark.parametrize(
    "values, text",
    [((), "{}"), ((3,), "{3}"), ((0, 1, 2), "{0,1,2}"), (range(1, 101), "{1..100}"),
     ((1, 2, 4, 5), "{1,2,4,5}")],
)
def test_format_domain(values, text):
    assert format_domain(DomainSet(values)) == text


@given(ints)
def test_values_are_sorted_and_unique(s):
    d = DomainSet(s)
    assert list(d.values) == sorted(s)
    assert len(d) == len(s)


@given(ints, ints)
def test_intersection_is_set_intersection(a, b):
    got = intersect(DomainSet(a), DomainSet(b))
    assert got == a & b
    assert got <= DomainSet(a) and got <= DomainSet(b)


@given(ints, ints, ints)
def test_intersection_is_commutative_and_associative(a, b, c):
    da, db, dc = DomainSet(a), DomainSet(b), DomainSet(c)
    assert da & db == db & da
    assert (da & db) & dc == da & (db & dc)


@given(ints)
def test_intersection_is_idempotent(a):
    d = DomainSet(a)
    assert d & d == d


@given(ints)
def test_equal_domains_hash_equal(a):
    assert hash(DomainSet(a)) == hash(DomainSet(sorted(a, reverse=True)))
