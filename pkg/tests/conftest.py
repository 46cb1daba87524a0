from pathlib import Path

import pytest

from cacs.constraints import all_different, greater_or_equal, linear_less, not_equal
from cacs.model import make_problem

FIXTURES = Path(__file__).parent / "fixtures"


def build_trace_example():
    """x, y, z in {0,1,2}; C1 = {x != y}, C2 = {x + y < z}."""
    p = make_problem("two-stage-trace")
    agents = [p.make_vagent(n) for n in ("A1", "A2", "A3")]
    c1, c2 = p.make_cagent("C1"), p.make_cagent("C2")
    x, y, z = (p.make_bounded_int_var(a, n, 0, 2) for a, n in zip(agents, "xyz"))
    p.post(c1, not_equal(x, y))
    p.post(c2, linear_less([x, y], z))
    return p.seal(), (x, y, z)


def build_builder_example():
    p = make_problem("example")
    v1, v2, v3 = (p.make_vagent(n) for n in ("v1", "v2", "v3"))
    c1, c2, c3 = (p.make_cagent(n) for n in ("c1", "c2", "c3"))
    x = p.make_bounded_int_var(v1, "x", 1, 100)
    y = p.make_bounded_int_var(v2, "y", 1, 100)
    z = p.make_bounded_int_var(v3, "z", 1, 100)
    p.post(c1, all_different(x, y, z))
    p.post(c2, greater_or_equal(x, y))
    p.post(c3, greater_or_equal(y, z))
    return p.seal(), (x, y, z)


@pytest.fixture
def trace_example():
    return build_trace_example()


@pytest.fixture
def builder_example():
    return build_builder_example()


@pytest.fixture
def fixtures_dir():
    return FIXTURES
