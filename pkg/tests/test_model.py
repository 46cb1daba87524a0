import pytest

from cacs.constraints import not_equal
from cacs.domain import DomainSet
from cacs.model import (
    AgentKind,
    DuplicateAgentError,
    DuplicateVariableError,
    ModelError,
    SealedProblemError,
    UnknownAgentError,
    UnknownVariableError,
    ValueOrder,
    make_problem,
    ordered_values,
)


def test_priority_follows_creation_order(trace_example):
    p, _ = trace_example
    assert [va.id.priority_index for va in p.vagents] == [0, 1, 2]
    assert [va.id.name for va in p.vagents] == ["A1", "A2", "A3"]
    assert p.vagents[0].id.kind is AgentKind.VARIABLE


def test_duplicates_are_rejected():
    p = make_problem("dup")
    a = p.make_vagent("a")
    p.make_bounded_int_var(a, "x", 0, 1)
    with pytest.raises(DuplicateAgentError):
        p.make_vagent("a")
    with pytest.raises(DuplicateVariableError):
        p.make_bounded_int_var(a, "x", 0, 2)
    p.make_cagent("c")
    with pytest.raises(DuplicateAgentError):
        p.make_cagent("c")


def test_same_variable_name_in_two_agents_is_allowed():
    p = make_problem("p")
    x1 = p.make_bounded_int_var(p.make_vagent("a"), "x", 0, 1)
    x2 = p.make_bounded_int_var(p.make_vagent("b"), "x", 0, 1)
    assert x1 != x2 and str(x1) == "x@a"


def test_unknown_references():
    p = make_problem("p")
    with pytest.raises(UnknownAgentError):
        p.make_bounded_int_var("ghost", "x", 0, 1)
    other = make_problem("q")
    y = other.make_bounded_int_var(other.make_vagent("b"), "y", 0, 1)
    x = p.make_bounded_int_var(p.make_vagent("a"), "x", 0, 1)
    c = p.make_cagent("c")
    with pytest.raises(UnknownVariableError):
        p.post(c, not_equal(x, y))


def test_seal_freezes_and_requires_constraints():
    p = make_problem("p")
    p.make_cagent("empty")
    with pytest.raises(ModelError):
        p.seal()

    q, _ = build_small()
    with pytest.raises(SealedProblemError):
        q.make_vagent("late")
    assert q.seal() is q


def build_small():
    p = make_problem("small")
    a, b = p.make_vagent("a"), p.make_vagent("b")
    x = p.make_bounded_int_var(a, "x", 0, 2)
    y = p.make_bounded_int_var(b, "y", 0, 2)
    c = p.make_cagent("c")
    p.post(c, not_equal(x, y))
    return p.seal(), (x, y)


def test_links_and_topology(trace_example):
    p, (x, y, z) = trace_example
    assert [c.name for c in p.controllers_of(x)] == ["C1", "C2"]
    assert [c.name for c in p.controllers_of(z)] == ["C2"]
    g = p.topology()
    assert g.number_of_nodes() == 5
    assert sorted((str(a), str(b)) for a, b in g.edges()) == sorted(
        [("A1", "C1"), ("A2", "C1"), ("A1", "C2"), ("A2", "C2"), ("A3", "C2")]
    )


def test_equality_ignores_value_order():
    p, _ = build_small()
    q = make_problem("small")
    a, b = q.make_vagent("a"), q.make_vagent("b")
    x = q.make_bounded_int_var(a, "x", 0, 2)
    y = q.make_bounded_int_var(b, "y", 0, 2)
    q.set_value_order(a, ValueOrder.DESCENDING)
    q.post(q.make_cagent("c"), not_equal(x, y))
    assert p == q.seal()


@pytest.mark.parametrize(
    "order, expected",
    [
        (ValueOrder.ASCENDING, [1, 2, 3, 4]),
        (ValueOrder.DESCENDING, [4, 3, 2, 1]),
        ((3, 9, 1), [3, 1, 2, 4]),
    ],
)
def test_ordered_values(order, expected):
    assert ordered_values(DomainSet([1, 2, 3, 4]), order) == expected
