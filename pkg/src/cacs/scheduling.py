"""Ship-loading scheduling on top of the controller-agent solver.

Each loading task becomes a variables' agent holding ``Start``, ``End``
and a fixed ``Duration``; an auxiliary ``General`` agent holds the overall
end time.  Three controllers group the constraints: durations and the
general end bound, precedences, and the cumulative workforce limit.

Task files are line oriented::

    # maxPersons timeHorizon
    8 20
    # index duration workers predecessors
    1 3 2
    2 2 1 1
    3 4 3 1,2
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Optional, Sequence

import networkx as nx
import numpy as np

from .constraints import cumulative, difference_equal, less_or_equal
from .engine import SolveResult
from .model import DcspProblem, OrderSpec, ValueOrder, VariableId


class SchedulingError(ValueError):
    pass


class CycleError(SchedulingError):
    def __init__(self, cycle: Sequence[int]):
        path = " -> ".join(str(i) for i in [*cycle, cycle[0]])
        super().__init__(f"precedence cycle: {path}")
        self.cycle = list(cycle)


class TaskFormatError(SchedulingError):
    def __init__(self, message: str, line: Optional[int] = None):
        super().__init__(f"line {line}: {message}" if line else message)
        self.line = line


class GanttTooWideError(SchedulingError):
    pass


@dataclass(frozen=True)
class LoadingTask:
    index: int
    duration: int
    workers: int
    predecessors: frozenset[int] = frozenset()


@dataclass
class LoadingProblemSpec:
    tasks: list[LoadingTask]
    max_persons: int
    time_horizon: int

    def task(self, index: int) -> LoadingTask:
        for t in self.tasks:
            if t.index == index:
                return t
        raise KeyError(index)

    def precedence_graph(self) -> nx.DiGraph:
        g = nx.DiGraph()
        g.add_nodes_from(t.index for t in self.tasks)
        for t in self.tasks:
            for pred in sorted(t.predecessors):
                g.add_edge(pred, t.index)
        return g

    def validate(self) -> None:
        indices = [t.index for t in self.tasks]
        if len(set(indices)) != len(indices):
            raise SchedulingError("duplicate task index")
        known = set(indices)
        for t in self.tasks:
            if t.duration < 1:
                raise SchedulingError(f"task {t.index}: duration must be >= 1")
            if t.workers < 0:
                raise SchedulingError(f"task {t.index}: workers must be >= 0")
            missing = t.predecessors - known
            if missing:
                raise SchedulingError(f"task {t.index}: unknown predecessor {min(missing)}")
        try:
            cycle = nx.find_cycle(self.precedence_graph())
        except nx.NetworkXNoCycle:
            cycle = None
        if cycle:
            raise CycleError([a for a, _ in cycle])
        if self.time_horizon < 0 or self.max_persons < 0:
            raise SchedulingError("time horizon and maxPersons must be non-negative")

    def area_bound_violated(self) -> bool:
        work = sum(t.duration * t.workers for t in self.tasks)
        return work > self.max_persons * self.time_horizon

    def longest_chain(self) -> int:
        """Sum of durations along the heaviest predecessor chain."""
        g = self.precedence_graph()
        finish: dict[int, int] = {}
        for i in nx.topological_sort(g):
            before = max((finish[p] for p in g.predecessors(i)), default=0)
            finish[i] = before + self.task(i).duration
        return max(finish.values(), default=0)


@dataclass
class LoadingPlan:
    starts: dict[int, int]
    ends: dict[int, int]
    general_end: int

    @property
    def makespan(self) -> int:
        return max(self.ends.values(), default=0)


@dataclass
class ShipLoadingModel:
    problem: DcspProblem
    spec: LoadingProblemSpec
    starts: dict[int, VariableId] = field(default_factory=dict)
    ends: dict[int, VariableId] = field(default_factory=dict)
    durations: dict[int, VariableId] = field(default_factory=dict)
    general_end: Optional[VariableId] = None

    def plan(self, result: SolveResult) -> Optional[LoadingPlan]:
        if not result.is_solution:
            return None
        a = result.assignment
        return LoadingPlan(
            starts={i: a[v] for i, v in self.starts.items()},
            ends={i: a[v] for i, v in self.ends.items()},
            general_end=a[self.general_end],
        )


def build_ship_loading(
    spec: LoadingProblemSpec,
    name: str = "shipload",
    general_order: OrderSpec = ValueOrder.DESCENDING,
) -> ShipLoadingModel:
    """One agent per task plus ``General``; three controllers.

    ``general_order`` is the proposal order of the ``General_End`` variable.
    It defaults to descending: ``General`` is created before the task agents
    and so proposes first, and starting from the horizon leaves the task
    agents free instead of forcing a makespan search.
    """
    spec.validate()
    horizon = spec.time_horizon
    p = DcspProblem(name)
    start_end = p.make_cagent("startEndController")
    precedence = p.make_cagent("precedenceController")
    cumulative_ctrl = p.make_cagent("cumulativeController")
    general = p.make_vagent("General")
    model = ShipLoadingModel(p, spec)
    model.general_end = p.make_bounded_int_var(general, "General_End", 0, horizon)
    p.set_value_order(general, general_order)

    for t in spec.tasks:
        agent = p.make_vagent(f"task_agent_{t.index}")
        s = p.make_bounded_int_var(agent, "Start", 0, horizon)
        e = p.make_bounded_int_var(agent, "End", 0, horizon)
        d = p.make_bounded_int_var(agent, "Duration", t.duration, t.duration)
        model.starts[t.index], model.ends[t.index], model.durations[t.index] = s, e, d
        p.post(start_end, difference_equal(e, s, d))
        p.post(start_end, less_or_equal(e, model.general_end))

    for t in spec.tasks:
        for pred in sorted(t.predecessors):
            p.post(precedence, less_or_equal(model.ends[pred], model.starts[t.index]))

    if spec.tasks:
        p.post(
            cumulative_ctrl,
            cumulative(
                [model.starts[t.index] for t in spec.tasks],
                [model.ends[t.index] for t in spec.tasks],
                [t.workers for t in spec.tasks],
                spec.max_persons,
            ),
        )
    # controllers left without constraints (no tasks / no precedences) are dropped
    p.cagents = [ca for ca in p.cagents if ca.constraints]
    p.seal()
    return model


# -- plan analysis ------------------------------------------------------------


def _check_tasks(plan: LoadingPlan, spec: LoadingProblemSpec) -> None:
    expected = {t.index for t in spec.tasks}
    if set(plan.starts) != expected or set(plan.ends) != expected:
        raise SchedulingError("plan and spec describe different task sets")


def scheduling_matrix(
    plan: LoadingPlan, spec: LoadingProblemSpec, width: Optional[int] = None
) -> np.ndarray:
    """``SC[i, j] = w_i`` when task ``i`` (spec order) is active at instant ``j``.

    Task ``i`` is active on the half-open interval ``[start, end)``.
    """
    _check_tasks(plan, spec)
    width = spec.time_horizon if width is None else width
    sc = np.zeros((len(spec.tasks), width), dtype=int)
    for row, t in enumerate(spec.tasks):
        lo = max(plan.starts[t.index], 0)
        hi = min(plan.ends[t.index], width)
        if hi > lo:
            sc[row, lo:hi] = t.workers
    return sc


@dataclass(frozen=True)
class Violation:
    kind: str  # duration | precedence | capacity | horizon
    tasks: tuple[int, ...]
    time: Optional[int]
    detail: str

    def __str__(self) -> str:
        return f"{self.kind}: {self.detail}"


@dataclass
class PlanVerdict:
    violations: list[Violation]

    @property
    def feasible(self) -> bool:
        return not self.violations

    def __str__(self) -> str:
        if self.feasible:
            return "FEASIBLE"
        return "INFEASIBLE\n" + "\n".join(f"  {v}" for v in self.violations)


def check_plan(plan: LoadingPlan, spec: LoadingProblemSpec) -> PlanVerdict:
    """Independent feasibility check of a plan against the task data."""
    _check_tasks(plan, spec)
    out: list[Violation] = []
    for t in spec.tasks:
        s, e = plan.starts[t.index], plan.ends[t.index]
        if e - s != t.duration:
            out.append(
                Violation("duration", (t.index,), None,
                          f"task {t.index}: end {e} - start {s} != duration {t.duration}")
            )
    for t in spec.tasks:
        for pred in sorted(t.predecessors):
            if plan.ends[pred] > plan.starts[t.index]:
                out.append(
                    Violation("precedence", (pred, t.index), None,
                              f"task {pred} ends at {plan.ends[pred]} after task "
                              f"{t.index} starts at {plan.starts[t.index]}")
                )
    width = max([spec.time_horizon, *plan.ends.values()])
    loads = scheduling_matrix(plan, spec, width).sum(axis=0)
    for j, load in enumerate(loads):
        if load > spec.max_persons:
            active = tuple(
                t.index for t in spec.tasks if plan.starts[t.index] <= j < plan.ends[t.index]
            )
            out.append(
                Violation("capacity", active, j,
                          f"time {j}: {int(load)} workers > maxPersons {spec.max_persons}")
            )
    for t in spec.tasks:
        if plan.starts[t.index] < 0:
            out.append(Violation("horizon", (t.index,), None,
                                 f"task {t.index} starts before 0"))
        if plan.ends[t.index] > plan.general_end:
            out.append(Violation("horizon", (t.index,), None,
                                 f"task {t.index} ends at {plan.ends[t.index]} "
                                 f"after general end {plan.general_end}"))
    if plan.general_end > spec.time_horizon:
        out.append(Violation("horizon", (), None,
                             f"general end {plan.general_end} beyond horizon {spec.time_horizon}"))
    return PlanVerdict(out)


def gantt_text(
    plan: LoadingPlan, spec: LoadingProblemSpec, max_width: int = 120, scale: int = 1
) -> str:
    """Fixed-width chart: one row per task, one column per ``scale`` time units.

    The footer row carries the worker load (the largest load within the
    column when ``scale > 1``).
    """
    if scale < 1:
        raise ValueError("scale must be >= 1")
    sc = scheduling_matrix(plan, spec)
    horizon = spec.time_horizon
    ncols = -(-horizon // scale)
    loads = sc.sum(axis=0) if len(spec.tasks) else np.zeros(horizon, dtype=int)
    buckets = [loads[j * scale:(j + 1) * scale] for j in range(ncols)]
    col_load = [int(b.max()) if len(b) else 0 for b in buckets]
    cell = max(1, len(str(max(col_load, default=0))))
    label = max([4, *(len(str(t.index)) for t in spec.tasks)])
    total = label + 2 + ncols * cell
    if total > max_width:
        need = -(-horizon * cell // max(1, max_width - label - 2))
        raise GanttTooWideError(
            f"chart needs {total} columns (max {max_width}); try --scale {need}"
        )
    lines = []
    if scale == 1:
        lines.append(" " * label + " |" + "".join(str(j // 10 % 10).rjust(cell) for j in range(ncols)))
    lines.append("t".rjust(label) + " |" + "".join(str(j % 10).rjust(cell) for j in range(ncols)))
    for t in spec.tasks:
        s, e = plan.starts[t.index], plan.ends[t.index]
        cells = [
            ("#" if s < (j + 1) * scale and e > j * scale else ".") * cell
            for j in range(ncols)
        ]
        lines.append(str(t.index).rjust(label) + " |" + "".join(cells))
    lines.append("load".rjust(label) + " |" + "".join(str(x).rjust(cell) for x in col_load))
    return "\n".join(lines) + "\n"


# -- task files ---------------------------------------------------------------


def parse_tasks(text: str) -> LoadingProblemSpec:
    header: Optional[tuple[int, int]] = None
    tasks: list[LoadingTask] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        fields = line.split()
        try:
            if header is None:
                if len(fields) != 2:
                    raise TaskFormatError("header must be 'maxPersons timeHorizon'", lineno)
                header = (int(fields[0]), int(fields[1]))
                continue
            if len(fields) not in (3, 4):
                raise TaskFormatError(
                    "task line must be 'index duration workers [pred,pred,...]'", lineno
                )
            preds: frozenset[int] = frozenset()
            if len(fields) == 4 and fields[3] != "-":
                preds = frozenset(int(x) for x in fields[3].split(",") if x)
            tasks.append(LoadingTask(int(fields[0]), int(fields[1]), int(fields[2]), preds))
        except ValueError as exc:
            if isinstance(exc, TaskFormatError):
                raise
            raise TaskFormatError(f"not an integer in {raw.strip()!r}", lineno) from None
    if header is None:
        raise TaskFormatError("missing 'maxPersons timeHorizon' header")
    spec = LoadingProblemSpec(tasks, header[0], header[1])
    spec.validate()
    return spec


def read_tasks(path) -> LoadingProblemSpec:
    with open(path, encoding="utf-8") as fh:
        return parse_tasks(fh.read())


def format_tasks(spec: LoadingProblemSpec) -> str:
    lines = ["# maxPersons timeHorizon", f"{spec.max_persons} {spec.time_horizon}",
             "# index duration workers predecessors"]
    for t in spec.tasks:
        preds = ",".join(str(i) for i in sorted(t.predecessors))
        lines.append(f"{t.index} {t.duration} {t.workers}" + (f" {preds}" if preds else ""))
    return "\n".join(lines) + "\n"


def random_loading_spec(
    seed: int, n_tasks: int = 6, max_duration: int = 4, max_workers: int = 3,
    pred_prob: float = 0.3, slack: int = 0,
) -> LoadingProblemSpec:
    """Random instance that is feasible by construction.

    The horizon is the serial makespan (plus ``slack``) and ``maxPersons``
    covers the busiest single task, so running the tasks one after another
    in index order is always a valid plan.
    """
    rng = random.Random(seed)
    tasks = []
    for i in range(1, n_tasks + 1):
        preds = frozenset(j for j in range(1, i) if rng.random() < pred_prob)
        tasks.append(
            LoadingTask(i, rng.randint(1, max_duration), rng.randint(1, max_workers), preds)
        )
    max_persons = max(t.workers for t in tasks) + rng.randint(0, max_workers)
    horizon = sum(t.duration for t in tasks) + slack
    return LoadingProblemSpec(tasks, max_persons, horizon)
