"""The two-stage controller-agent solve.

Stage one (domain reduction): every variables' agent announces its domains
to the controllers linked to them; a controller holding all its scope
domains propagates its constraints and sends changed domains back; owners
intersect what they receive and re-announce anything that shrank.  The
loop ends when the substrate is quiescent.

Stage two (value proposal): depth-first over variables in priority order.
A proposal pins the proposer's variable to one value and the network
re-runs reduction.  Each controller linked to the proposed variable then
votes; acceptance is unanimous.  A rejected proposal restores the snapshot
taken before it and the next value is tried.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass, field
from typing import Mapping, Optional

from .constraints import check, fixpoint_propagate
from .domain import DomainSet, intersect
from .messaging import (
    DeliveryEvent,
    DomainInfo,
    NoSolution,
    ProposalAccepted,
    ProposalRejected,
    ProtocolMessage,
    ReducedDomain,
    SolutionFound,
    Substrate,
    ValueProposal,
)
from .model import (
    AgentId,
    DcspProblem,
    SealedProblemError,
    VariableId,
    ordered_values,
)


class EngineError(RuntimeError):
    """Internal protocol invariant violated."""


# -- runtime agents ----------------------------------------------------------


class VariableAgent:
    def __init__(self, state, links: Mapping[VariableId, list[AgentId]]):
        self.id: AgentId = state.id
        self.order = state.value_order
        self.variables: list[VariableId] = list(state.variables)
        self.current: dict[VariableId, DomainSet] = dict(state.variables)
        self.links = {v: list(links.get(v, ())) for v in self.variables}
        self.emptied: dict[VariableId, int] = {}
        self.verdicts: dict[int, list[bool]] = {}
        self.outcome: Optional[object] = None

    def _announce(self, v: VariableId, substrate: Substrate) -> None:
        for ctrl in self.links[v]:
            substrate.send(ProtocolMessage(self.id, ctrl, DomainInfo(v, self.current[v])))

    def announce(self, substrate: Substrate) -> None:
        for v in self.variables:
            self._announce(v, substrate)

    def propose(self, v: VariableId, value: int, pid: int, substrate: Substrate) -> None:
        self.current[v] = intersect(self.current[v], DomainSet((value,)))
        for ctrl in self.links[v]:
            substrate.send(ProtocolMessage(self.id, ctrl, ValueProposal(v, value, pid)))

    def receive(self, message: ProtocolMessage, substrate: Substrate) -> None:
        p = message.payload
        if isinstance(p, ReducedDomain):
            old = self.current[p.variable]
            new = intersect(old, p.domain)
            if new != old:
                self.current[p.variable] = new
                if not new:
                    self.emptied.setdefault(p.variable, len(substrate.log))
                self._announce(p.variable, substrate)
        elif isinstance(p, ProposalAccepted):
            self.verdicts.setdefault(p.proposal_id, []).append(True)
        elif isinstance(p, ProposalRejected):
            self.verdicts.setdefault(p.proposal_id, []).append(False)
        elif isinstance(p, (SolutionFound, NoSolution)):
            self.outcome = p

    def snapshot(self):
        return dict(self.current), dict(self.emptied)

    def restore(self, snap) -> None:
        self.current, self.emptied = dict(snap[0]), dict(snap[1])


class ControllerAgent:
    def __init__(self, state):
        self.id: AgentId = state.id
        self.constraints = list(state.constraints)
        self.owners: dict[VariableId, AgentId] = {}
        for c in self.constraints:
            for v in c.scope:
                self.owners[v] = v.owner
        self.copies: dict[VariableId, Optional[DomainSet]] = {v: None for v in self.owners}
        self.proposals: dict[int, AgentId] = {}
        self.outcome: Optional[object] = None

    @property
    def ready(self) -> bool:
        return all(d is not None for d in self.copies.values())

    def receive(self, message: ProtocolMessage, substrate: Substrate) -> None:
        p = message.payload
        if isinstance(p, ValueProposal):
            # a proposal is a domain reduced to one value
            self.proposals[p.proposal_id] = message.sender
            v, incoming = p.variable, DomainSet((p.value,))
        elif isinstance(p, DomainInfo):
            v, incoming = p.variable, p.domain
        else:
            if isinstance(p, (SolutionFound, NoSolution)):
                self.outcome = p
            return
        was_ready = self.ready
        old = self.copies[v]
        self.copies[v] = incoming if old is None else intersect(old, incoming)
        if not self.ready:
            return
        if was_ready:
            if self.copies[v] == old:
                return
            reduced = fixpoint_propagate(self.constraints, self.copies, changed=(v,))
        else:
            reduced = fixpoint_propagate(self.constraints, self.copies)
        for var, d in reduced.items():
            if d != self.copies[var]:
                self.copies[var] = d
                substrate.send(ProtocolMessage(self.id, self.owners[var], ReducedDomain(var, d)))

    def validate(self, pid: int, substrate: Substrate) -> None:
        proposer = self.proposals.pop(pid)
        empty = [v for v, d in self.copies.items() if d is not None and not d]
        if empty:
            payload = ProposalRejected(pid, f"empty domain for {empty[0]}")
        else:
            payload = ProposalAccepted(pid)
        substrate.send(ProtocolMessage(self.id, proposer, payload))

    def snapshot(self):
        return dict(self.copies)

    def restore(self, snap) -> None:
        self.copies = dict(snap)


# -- results ----------------------------------------------------------------


class StageOneKind(enum.Enum):
    FAILURE = "failure"
    SOLVED = "solved"
    REDUCED = "reduced"


@dataclass
class StageOneOutcome:
    kind: StageOneKind
    domains: dict[VariableId, DomainSet]
    emptied_variable: Optional[VariableId] = None

    @property
    def assignment(self) -> dict[VariableId, int]:
        if self.kind is not StageOneKind.SOLVED:
            raise ValueError("stage one did not solve the problem")
        return {v: d.min for v, d in self.domains.items()}


class ResultKind(enum.Enum):
    SOLUTION = "solution"
    NO_SOLUTION = "no-solution"


@dataclass
class ProposalFrame:
    proposer: AgentId
    variable: VariableId
    value: int
    snapshot: dict[VariableId, DomainSet]
    remaining_values: list[int]


@dataclass
class BacktrackRecord:
    """Domains before a proposal and after its retraction."""

    proposal_id: int
    variable: VariableId
    value: int
    rejected: bool
    snapshot: dict
    restored: dict


@dataclass
class SolveResult:
    kind: ResultKind
    assignment: dict[VariableId, int] = field(default_factory=dict)
    deliveries: int = 0
    proposals_tried: int = 0
    emptied_variable: Optional[VariableId] = None
    trace: list = field(default_factory=list)
    backtracks: list[BacktrackRecord] = field(default_factory=list)

    @property
    def is_solution(self) -> bool:
        return self.kind is ResultKind.SOLUTION

    def trace_lines(self) -> list[str]:
        return [e.format() if isinstance(e, DeliveryEvent) else e for e in self.trace]


# -- orchestration ----------------------------------------------------------


def default_max_deliveries(p: DcspProblem) -> int:
    doms = p.domains()
    widest = max((len(d) for d in doms.values()), default=1)
    return 10_000 * max(1, len(doms) * widest)


class Engine:
    """Owns the substrate and runtime agents for one solve run."""

    def __init__(
        self,
        p: DcspProblem,
        seed: int = 0,
        max_deliveries: Optional[int] = None,
        record_backtracks: bool = False,
    ):
        if not p.sealed:
            raise SealedProblemError(f"problem {p.name!r} must be sealed before solving")
        self.problem = p
        self.seed = seed
        self.max_deliveries = max_deliveries or default_max_deliveries(p)
        self.record_backtracks = record_backtracks
        self.substrate = Substrate(seed)
        links = {v: p.controllers_of(v) for v in p.variables()}
        self.vagents = [VariableAgent(va, links) for va in p.vagents]
        self.cagents = [ControllerAgent(ca) for ca in p.cagents]
        for agent in [*self.vagents, *self.cagents]:
            self.substrate.register(agent)
        self.order: list[tuple[VariableAgent, VariableId]] = [
            (a, v) for a in self.vagents for v in a.variables
        ]
        self.trace: list = []
        self._pids = itertools.count(1)
        self.proposals_tried = 0
        self.backtracks: list[BacktrackRecord] = []
        self.frames: list[ProposalFrame] = []

    # -- helpers ---------------------------------------------------------

    def _run(self) -> None:
        self.trace.extend(self.substrate.run_until_quiescent(self.max_deliveries))

    def domains(self) -> dict[VariableId, DomainSet]:
        return {v: a.current[v] for a, v in self.order}

    def snapshot(self) -> dict:
        return {a.id: a.snapshot() for a in (*self.vagents, *self.cagents)}

    def restore(self, snap: dict) -> None:
        for a in (*self.vagents, *self.cagents):
            a.restore(snap[a.id])

    def _state_view(self) -> dict:
        view = {("vagent", v): d for v, d in self.domains().items()}
        for c in self.cagents:
            for v, d in c.copies.items():
                view[(c.id.name, v)] = d
        return view

    def _first_emptied(self) -> Optional[VariableId]:
        hits = [(seq, v) for a in self.vagents for v, seq in a.emptied.items()]
        if not hits:
            return None
        order = {v: i for i, (_, v) in enumerate(self.order)}
        return min(hits, key=lambda h: (h[0], order[h[1]]))[1]

    def _announce_outcome(self, payload) -> None:
        if not self.vagents:
            return
        head = self.vagents[0]
        for a in (*self.vagents[1:], *self.cagents):
            self.substrate.send(ProtocolMessage(head.id, a.id, payload))
        head.outcome = payload
        self._run()

    # -- stage one ---------------------------------------------------------

    def reduce_domains(self) -> StageOneOutcome:
        for a in self.vagents:
            a.announce(self.substrate)
        self._run()
        doms = self.domains()
        if any(not d for d in doms.values()):
            return StageOneOutcome(StageOneKind.FAILURE, doms, self._first_emptied())
        if all(len(d) == 1 for d in doms.values()):
            return StageOneOutcome(StageOneKind.SOLVED, doms)
        return StageOneOutcome(StageOneKind.REDUCED, doms)

    # -- stage two ---------------------------------------------------------

    def _next_open(self) -> Optional[tuple[VariableAgent, VariableId]]:
        for a, v in self.order:
            if len(a.current[v]) > 1:
                return a, v
        return None

    def _propose(self, agent: VariableAgent, v: VariableId, value: int) -> tuple[bool, int]:
        pid = next(self._pids)
        self.proposals_tried += 1
        self.trace.append(f"propose #{pid} {v}={value}")
        agent.propose(v, value, pid, self.substrate)
        self._run()
        for ctrl in self.cagents:
            if pid in ctrl.proposals:
                ctrl.validate(pid, self.substrate)
        self._run()
        votes = agent.verdicts.pop(pid, [])
        accepted = all(votes)
        if accepted and any(not d for d in self.domains().values()):
            raise EngineError(f"proposal #{pid} accepted with an empty domain")
        self.trace.append(f"{'accept' if accepted else 'reject'} #{pid}")
        return accepted, pid

    def search(self, depth: int = 0) -> bool:
        nxt = self._next_open()
        if nxt is None:
            return True
        agent, v = nxt
        values = ordered_values(agent.current[v], agent.order)
        snap = self.snapshot()
        before = self._state_view() if self.record_backtracks else None
        for i, value in enumerate(values):
            frame = ProposalFrame(agent.id, v, value, self.domains(), values[i + 1:])
            self.frames.append(frame)
            self.trace.append(f"frame-push {depth} {v}={value}")
            accepted, pid = self._propose(agent, v, value)
            if accepted and self.search(depth + 1):
                return True
            self.restore(snap)
            self.frames.pop()
            self.trace.append(f"frame-pop {depth} {v}={value}")
            if self.record_backtracks:
                self.backtracks.append(
                    BacktrackRecord(pid, v, value, not accepted, before, self._state_view())
                )
        return False

    # -- driver ------------------------------------------------------------

    def _result(self, kind: ResultKind, assignment=None, emptied=None) -> SolveResult:
        return SolveResult(
            kind=kind,
            assignment=assignment or {},
            deliveries=len(self.substrate.log),
            proposals_tried=self.proposals_tried,
            emptied_variable=emptied,
            trace=self.trace,
            backtracks=self.backtracks,
        )

    def _finish_solution(self) -> SolveResult:
        assignment = {v: d.min for v, d in self.domains().items()}
        for c in self.problem.constraints():
            if not check(c, assignment):
                raise EngineError(f"solution violates {c}")
        self._announce_outcome(SolutionFound(tuple(assignment.items())))
        return self._result(ResultKind.SOLUTION, assignment)

    def value_search(self) -> SolveResult:
        if self.search():
            return self._finish_solution()
        self._announce_outcome(NoSolution())
        return self._result(ResultKind.NO_SOLUTION)

    def solve(self) -> SolveResult:
        outcome = self.reduce_domains()
        if outcome.kind is StageOneKind.FAILURE:
            self.trace.append(f"stage-one failure {outcome.emptied_variable}")
            self._announce_outcome(NoSolution(outcome.emptied_variable))
            return self._result(ResultKind.NO_SOLUTION, emptied=outcome.emptied_variable)
        if outcome.kind is StageOneKind.SOLVED:
            return self._finish_solution()
        return self.value_search()


def run_domain_reduction(
    p: DcspProblem, seed: int = 0, max_deliveries: Optional[int] = None
) -> StageOneOutcome:
    return Engine(p, seed, max_deliveries).reduce_domains()


def run_value_search(
    p: DcspProblem,
    start: Mapping[VariableId, DomainSet],
    seed: int = 0,
    max_deliveries: Optional[int] = None,
) -> SolveResult:
    """Stage two from a given (non-failing) domain map."""
    engine = Engine(p, seed, max_deliveries)
    for a in engine.vagents:
        for v in a.variables:
            a.current[v] = intersect(a.current[v], start[v])
    engine.reduce_domains()
    return engine.value_search()


def solve(
    p: DcspProblem,
    seed: int = 0,
    max_deliveries: Optional[int] = None,
    record_backtracks: bool = False,
) -> SolveResult:
    return Engine(p, seed, max_deliveries, record_backtracks).solve()
