import pytest
from hypothesis import given, settings, strategies as st

from cacs.constraints import check, fixpoint_propagate, not_equal
from cacs.domain import DomainSet
from cacs.engine import (
    Engine,
    ResultKind,
    StageOneKind,
    run_domain_reduction,
    run_value_search,
    solve,
)
from cacs.generate import random_problem
from cacs.messaging import NonTerminationError, ReducedDomain
from cacs.model import ValueOrder, make_problem
from cacs.oracle import brute_force
from cacs.xmlio import read_dcsdp

from conftest import FIXTURES


def test_stage_one_two_stage_example(trace_example):
    p, (x, y, z) = trace_example
    out = run_domain_reduction(p)
    assert out.kind is StageOneKind.REDUCED
    assert out.domains == {x: {0, 1}, y: {0, 1}, z: {1, 2}}


def test_stage_two_trace_narrative(trace_example):
    p, (x, y, z) = trace_example
    result = solve(p)
    assert result.assignment == {x: 0, y: 1, z: 2}
    assert result.proposals_tried == 1
    lines = result.trace_lines()
    assert "propose #1 x@A1=0" in lines and "accept #1" in lines
    reduced = [e.message.payload for e in result.trace
               if not isinstance(e, str) and isinstance(e.message.payload, ReducedDomain)]
    assert any(r.variable == y and r.domain == {1} for r in reduced)
    assert any(r.variable == z and r.domain == {2} for r in reduced)


def test_overconstrained_reports_emptied_variable():
    p = read_dcsdp(FIXTURES / "overconstrained.xml")
    result = solve(p)
    assert result.kind is ResultKind.NO_SOLUTION
    assert result.emptied_variable is not None
    assert result.proposals_tried == 0


def test_stage_one_can_solve_outright():
    p = make_problem("solved")
    x = p.make_bounded_int_var(p.make_vagent("a"), "x", 1, 1)
    y = p.make_bounded_int_var(p.make_vagent("b"), "y", 1, 2)
    p.post(p.make_cagent("c"), not_equal(x, y))
    p.seal()
    assert run_domain_reduction(p).kind is StageOneKind.SOLVED
    result = solve(p)
    assert result.assignment == {x: 1, y: 2} and result.proposals_tried == 0


def test_unconstrained_variables_are_still_assigned():
    p = make_problem("free")
    x = p.make_bounded_int_var(p.make_vagent("a"), "x", 3, 5)
    result = solve(p.seal())
    assert result.assignment == {x: 3}


def test_descending_order_steers_the_result(trace_example):
    p = make_problem("desc")
    a = p.make_vagent("a")
    x = p.make_bounded_int_var(a, "x", 0, 4)
    y = p.make_bounded_int_var(p.make_vagent("b"), "y", 0, 4)
    p.post(p.make_cagent("c"), not_equal(x, y))
    p.set_value_order(a, ValueOrder.DESCENDING)
    result = solve(p.seal())
    assert result.assignment == {x: 4, y: 0}


def test_pigeonhole_backtracks_restore_snapshots():
    p = read_dcsdp(FIXTURES / "pigeonhole.xml")
    result = solve(p, record_backtracks=True)
    assert sum(b.rejected for b in result.backtracks) == 4
    assert all(b.restored == b.snapshot for b in result.backtracks)
    assert [result.assignment[v] for v in p.variables()] == [4, 0, 1, 2, 3]


def test_run_value_search_from_reduced_domains(trace_example):
    p, (x, y, z) = trace_example
    start = dict(run_domain_reduction(p).domains)
    start[x] = DomainSet([1])
    result = run_value_search(p, start)
    assert result.assignment == {x: 1, y: 0, z: 2}


def test_tiny_budget_raises(trace_example):
    p, _ = trace_example
    with pytest.raises(NonTerminationError):
        solve(p, max_deliveries=3)


def test_unsealed_problem_is_refused():
    p = make_problem("open")
    p.make_bounded_int_var(p.make_vagent("a"), "x", 0, 1)
    with pytest.raises(Exception):
        Engine(p)


def test_same_seed_same_trace(builder_example):
    p, _ = builder_example
    assert solve(p, seed=11).trace_lines() == solve(p, seed=11).trace_lines()


def _nonempty(d):
    return all(v for v in d.values())


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 10**6), st.integers(0, 50))
def test_stage_one_equals_centralised_fixpoint(seed, sched):
    p = random_problem(seed)
    distributed = run_domain_reduction(p, seed=sched).domains
    central = fixpoint_propagate(p.constraints(), p.domains())
    if _nonempty(central):
        assert distributed == central
    else:
        assert not _nonempty(distributed)


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 10**6))
def test_stage_one_never_removes_solutions(seed):
    p = random_problem(seed)
    out = run_domain_reduction(p)
    oracle = brute_force(p)
    if oracle.satisfiable:
        assert all(oracle.witness[v] in out.domains[v] for v in p.variables())


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 10**6))
def test_solutions_check_and_match_oracle(seed):
    p = random_problem(seed, random_orders=True)
    result = solve(p, seed=seed)
    assert result.is_solution == brute_force(p).satisfiable
    if result.is_solution:
        assert all(check(c, result.assignment) for c in p.constraints())


def test_ascending_search_finds_the_lex_minimum():
    for seed in range(200):
        p = random_problem(seed)
        result = solve(p)
        oracle = brute_force(p, lex_min=True)
        if oracle.satisfiable:
            assert result.assignment == oracle.witness, seed
