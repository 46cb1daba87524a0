"""DCSP problem model: agents, variable ownership, controller grouping.

Build a problem with the builder methods, then :meth:`DcspProblem.seal` it
before handing it to the engine::

    p = make_problem("example")
    v1 = p.make_vagent("v1")
    c1 = p.make_cagent("c1")
    x = p.make_bounded_int_var(v1, "x", 1, 100)
    ...
    p.post(c1, all_different(x, y, z))
    p.seal()
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Sequence, Union

import networkx as nx

from .constraints import ConstraintSpec
from .domain import DomainSet, bounded_range


class ModelError(Exception):
    """Base class for problem-building errors."""


class DuplicateAgentError(ModelError):
    pass


class DuplicateVariableError(ModelError):
    pass


class UnknownAgentError(ModelError):
    pass


class UnknownVariableError(ModelError):
    pass


class SealedProblemError(ModelError):
    """Mutation attempted on a sealed problem (or solve on an unsealed one)."""


class AgentKind(enum.Enum):
    VARIABLE = "vagent"
    CONTROLLER = "cagent"


@dataclass(frozen=True)
class AgentId:
    name: str
    kind: AgentKind
    priority_index: int = 0

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class VariableId:
    name: str
    owner: AgentId

    def __str__(self) -> str:
        return f"{self.name}@{self.owner.name}"


class ValueOrder(enum.Enum):
    ASCENDING = "ascending"
    DESCENDING = "descending"


OrderSpec = Union[ValueOrder, Sequence[int]]


def ordered_values(domain: DomainSet, order: OrderSpec) -> list[int]:
    """Domain values in proposal order.

    An explicit list is honoured first; domain values it omits follow in
    ascending order so that search stays complete.
    """
    if order is ValueOrder.ASCENDING:
        return list(domain.values)
    if order is ValueOrder.DESCENDING:
        return list(reversed(domain.values))
    head = []
    for v in order:
        if v in domain and v not in head:
            head.append(v)
    listed = set(head)
    return head + [v for v in domain.values if v not in listed]


@dataclass
class VariableAgentState:
    id: AgentId
    variables: dict[VariableId, DomainSet] = field(default_factory=dict)
    linked_controllers: list[AgentId] = field(default_factory=list)
    value_order: OrderSpec = ValueOrder.ASCENDING

    def __eq__(self, other: object) -> bool:
        # value_order is a search preference, not part of the problem
        if not isinstance(other, VariableAgentState):
            return NotImplemented
        return (
            self.id == other.id
            and list(self.variables.items()) == list(other.variables.items())
            and self.linked_controllers == other.linked_controllers
        )


@dataclass
class ControllerAgentState:
    id: AgentId
    constraints: list[ConstraintSpec] = field(default_factory=list)
    domain_copies: dict[VariableId, DomainSet] = field(default_factory=dict)


@dataclass(eq=False)
class DcspProblem:
    name: str
    vagents: list[VariableAgentState] = field(default_factory=list)
    cagents: list[ControllerAgentState] = field(default_factory=list)
    sealed: bool = False

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, DcspProblem):
            return NotImplemented
        return (
            self.name == other.name
            and self.vagents == other.vagents
            and self.cagents == other.cagents
        )

    # -- lookup ----------------------------------------------------------

    def vagent(self, agent: AgentId | str) -> VariableAgentState:
        name = agent.name if isinstance(agent, AgentId) else agent
        for va in self.vagents:
            if va.id.name == name:
                if isinstance(agent, AgentId) and agent != va.id:
                    break
                return va
        raise UnknownAgentError(f"unknown variables' agent {name!r}")

    def cagent(self, agent: AgentId | str) -> ControllerAgentState:
        name = agent.name if isinstance(agent, AgentId) else agent
        for ca in self.cagents:
            if ca.id.name == name:
                if isinstance(agent, AgentId) and agent != ca.id:
                    break
                return ca
        raise UnknownAgentError(f"unknown controller agent {name!r}")

    def variables(self) -> list[VariableId]:
        """All variables, by owner priority then creation order."""
        return [v for va in self.vagents for v in va.variables]

    def domains(self) -> dict[VariableId, DomainSet]:
        return {v: d for va in self.vagents for v, d in va.variables.items()}

    def constraints(self) -> list[ConstraintSpec]:
        return [c for ca in self.cagents for c in ca.constraints]

    def find_variable(self, name: str, owner: str) -> VariableId:
        for v in self.vagent(owner).variables:
            if v.name == name:
                return v
        raise UnknownVariableError(f"no variable {name!r} owned by {owner!r}")

    # -- building --------------------------------------------------------

    def _mutable(self) -> None:
        if self.sealed:
            raise SealedProblemError(f"problem {self.name!r} is sealed")

    def make_vagent(self, name: str) -> AgentId:
        self._mutable()
        if any(va.id.name == name for va in self.vagents):
            raise DuplicateAgentError(f"variables' agent {name!r} already exists")
        aid = AgentId(name, AgentKind.VARIABLE, len(self.vagents))
        self.vagents.append(VariableAgentState(aid))
        return aid

    def make_cagent(self, name: str) -> AgentId:
        self._mutable()
        if any(ca.id.name == name for ca in self.cagents):
            raise DuplicateAgentError(f"controller agent {name!r} already exists")
        aid = AgentId(name, AgentKind.CONTROLLER, len(self.cagents))
        self.cagents.append(ControllerAgentState(aid))
        return aid

    def make_bounded_int_var(
        self, owner: AgentId | str, name: str, inf: int, sup: int
    ) -> VariableId:
        self._mutable()
        va = self.vagent(owner)
        if any(v.name == name for v in va.variables):
            raise DuplicateVariableError(
                f"variable {name!r} already exists in agent {va.id.name!r}"
            )
        domain = bounded_range(inf, sup)
        vid = VariableId(name, va.id)
        va.variables[vid] = domain
        return vid

    def post(self, controller: AgentId | str, c: ConstraintSpec) -> None:
        self._mutable()
        ca = self.cagent(controller)
        known = self.domains()
        for v in c.scope:
            if v not in known:
                raise UnknownVariableError(f"constraint {c} uses unknown variable {v!r}")
        ca.constraints.append(c)
        for v in c.scope:
            ca.domain_copies.setdefault(v, known[v])
            owner = self.vagent(v.owner)
            if ca.id not in owner.linked_controllers:
                # kept in creation order so the list does not depend on post order
                owner.linked_controllers.append(ca.id)
                owner.linked_controllers.sort(key=lambda a: a.priority_index)

    def set_value_order(self, agent: AgentId | str, order: OrderSpec) -> None:
        self._mutable()
        va = self.vagent(agent)
        if not isinstance(order, ValueOrder):
            order = tuple(int(v) for v in order)
        va.value_order = order

    def seal(self) -> DcspProblem:
        if self.sealed:
            return self
        for ca in self.cagents:
            if not ca.constraints:
                raise ModelError(f"controller {ca.id.name!r} holds no constraint")
        self.sealed = True
        return self

    # -- views -----------------------------------------------------------

    def controllers_of(self, v: VariableId) -> list[AgentId]:
        """Controllers holding a constraint whose scope includes ``v``."""
        return [
            ca.id for ca in self.cagents if any(v in c.scope for c in ca.constraints)
        ]

    def topology(self) -> nx.Graph:
        """Bipartite agent graph: variables' agents on side 0, controllers on side 1."""
        g = nx.Graph(name=self.name)
        for va in self.vagents:
            g.add_node(va.id, bipartite=0, kind="vagent")
        for ca in self.cagents:
            g.add_node(ca.id, bipartite=1, kind="cagent")
        for ca in self.cagents:
            for c in ca.constraints:
                for v in c.scope:
                    g.add_edge(v.owner, ca.id)
        return g


def make_problem(name: str) -> DcspProblem:
    return DcspProblem(name)
