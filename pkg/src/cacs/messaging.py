"""In-process mailbox substrate with seed-deterministic delivery.

Every (sender, recipient) pair has its own FIFO channel.  :meth:`Substrate.step`
picks one non-empty channel with a seeded RNG and delivers its head message,
so per-sender ordering always holds while interleaving between senders is
a function of the seed alone.
"""

from __future__ import annotations

import random
from collections import deque
from dataclasses import dataclass
from typing import Optional, Protocol, Union

from .domain import DomainSet, format_domain
from .model import AgentId, VariableId


class RoutingError(LookupError):
    """Message addressed to an agent the substrate does not know."""


class NonTerminationError(RuntimeError):
    """Delivery budget exhausted before quiescence; carries the log so far."""

    def __init__(self, message: str, log: list[DeliveryEvent]):
        super().__init__(message)
        self.log = log


# -- payloads ---------------------------------------------------------------


@dataclass(frozen=True)
class DomainInfo:
    variable: VariableId
    domain: DomainSet


@dataclass(frozen=True)
class ReducedDomain:
    variable: VariableId
    domain: DomainSet


@dataclass(frozen=True)
class ValueProposal:
    variable: VariableId
    value: int
    proposal_id: int


@dataclass(frozen=True)
class ProposalRejected:
    proposal_id: int
    reason: str = ""


@dataclass(frozen=True)
class ProposalAccepted:
    proposal_id: int


@dataclass(frozen=True)
class NoSolution:
    variable: Optional[VariableId] = None


@dataclass(frozen=True)
class SolutionFound:
    assignment: tuple[tuple[VariableId, int], ...]


Payload = Union[
    DomainInfo,
    ReducedDomain,
    ValueProposal,
    ProposalRejected,
    ProposalAccepted,
    NoSolution,
    SolutionFound,
]

_KIND_NAMES = {
    DomainInfo: "domain-info",
    ReducedDomain: "reduced-domain",
    ValueProposal: "value-proposal",
    ProposalRejected: "proposal-rejected",
    ProposalAccepted: "proposal-accepted",
    NoSolution: "no-solution",
    SolutionFound: "solution-found",
}


def payload_kind(payload: Payload) -> str:
    return _KIND_NAMES[type(payload)]


@dataclass(frozen=True)
class ProtocolMessage:
    sender: AgentId
    recipient: AgentId
    payload: Payload


@dataclass(frozen=True)
class DeliveryEvent:
    seq: int
    message: ProtocolMessage

    def format(self) -> str:
        """``seq from to payload-kind variable domain/value``; ``-`` marks n/a."""
        m = self.message
        p = m.payload
        var, detail = "-", "-"
        if isinstance(p, (DomainInfo, ReducedDomain)):
            var, detail = str(p.variable), format_domain(p.domain)
        elif isinstance(p, ValueProposal):
            var, detail = str(p.variable), f"{p.value}#{p.proposal_id}"
        elif isinstance(p, (ProposalAccepted, ProposalRejected)):
            detail = f"#{p.proposal_id}"
        elif isinstance(p, NoSolution) and p.variable is not None:
            var = str(p.variable)
        elif isinstance(p, SolutionFound):
            detail = ",".join(f"{v}={x}" for v, x in p.assignment)
        return f"{self.seq} {m.sender} {m.recipient} {payload_kind(p)} {var} {detail}"


class Agent(Protocol):
    id: AgentId

    def receive(self, message: ProtocolMessage, substrate: Substrate) -> None: ...


class Substrate:
    def __init__(self, seed: int = 0):
        self.seed = seed
        self._rng = random.Random(seed)
        self._agents: dict[AgentId, Agent] = {}
        self._channels: dict[tuple[AgentId, AgentId], deque[ProtocolMessage]] = {}
        self.log: list[DeliveryEvent] = []
        self.sent = 0

    @property
    def agents(self) -> dict[AgentId, Agent]:
        return self._agents

    def register(self, agent: Agent) -> None:
        self._agents[agent.id] = agent

    def send(self, message: ProtocolMessage) -> None:
        if message.recipient not in self._agents:
            raise RoutingError(f"no agent registered as {message.recipient}")
        key = (message.sender, message.recipient)
        channel = self._channels.get(key)
        if channel is None:
            channel = self._channels[key] = deque()
        channel.append(message)
        self.sent += 1

    def pending(self) -> int:
        return sum(len(ch) for ch in self._channels.values())

    def step(self) -> Optional[DeliveryEvent]:
        """Deliver one message; ``None`` means quiescent."""
        ready = [key for key, ch in self._channels.items() if ch]
        if not ready:
            return None
        key = ready[self._rng.randrange(len(ready))] if len(ready) > 1 else ready[0]
        message = self._channels[key].popleft()
        event = DeliveryEvent(len(self.log) + 1, message)
        self.log.append(event)
        self._agents[message.recipient].receive(message, self)
        return event

    def run_until_quiescent(self, max_deliveries: int) -> list[DeliveryEvent]:
        """Step until no message is pending; returns the events of this run."""
        start = len(self.log)
        for _ in range(max_deliveries):
            if self.step() is None:
                return self.log[start:]
        if not self.pending():
            return self.log[start:]
        raise NonTerminationError(
            f"no quiescence after {max_deliveries} deliveries", list(self.log)
        )


def format_trace(events) -> str:
    return "".join(e.format() + "\n" for e in events)
