"""Matplotlib figures for reports: loading-plan Gantt chart and agent topology.

Figures are built with :class:`matplotlib.figure.Figure` directly, so no GUI
backend or pyplot state is involved.
"""

from __future__ import annotations

import networkx as nx
import numpy as np
from matplotlib.figure import Figure
from matplotlib.ticker import MaxNLocator

from .model import DcspProblem
from .scheduling import LoadingPlan, LoadingProblemSpec, scheduling_matrix


def gantt_figure(plan: LoadingPlan, spec: LoadingProblemSpec) -> Figure:
    fig = Figure(figsize=(8, 1.2 + 0.45 * max(len(spec.tasks), 1) + 1.8))
    ax, load_ax = fig.subplots(
        2, 1, sharex=True, gridspec_kw={"height_ratios": [max(len(spec.tasks), 1), 3]}
    )
    for row, t in enumerate(spec.tasks):
        s, e = plan.starts[t.index], plan.ends[t.index]
        ax.broken_barh([(s, e - s)], (row - 0.4, 0.8), facecolors="tab:blue")
        ax.text(s + (e - s) / 2, row, str(t.workers), ha="center", va="center",
                color="white", fontsize=8)
    ax.set_yticks(range(len(spec.tasks)), [str(t.index) for t in spec.tasks])
    ax.invert_yaxis()
    ax.set_ylabel("task")
    ax.grid(axis="x", alpha=0.3)

    loads = scheduling_matrix(plan, spec).sum(axis=0) if spec.tasks else np.zeros(0)
    load_ax.step(np.arange(len(loads) + 1), np.append(loads, 0), where="post")
    load_ax.axhline(spec.max_persons, color="tab:red", linestyle="--", label="maxPersons")
    load_ax.set_xlim(0, max(spec.time_horizon, 1))
    load_ax.set_ylim(0, max(spec.max_persons, int(loads.max(initial=0))) + 1)
    load_ax.xaxis.set_major_locator(MaxNLocator(integer=True))
    load_ax.set_xlabel("time")
    load_ax.set_ylabel("workers")
    load_ax.legend(loc="upper right", fontsize=8)
    fig.tight_layout()
    return fig


def topology_figure(p: DcspProblem) -> Figure:
    g = p.topology()
    vnodes = [n for n, d in g.nodes(data=True) if d["bipartite"] == 0]
    cnodes = [n for n, d in g.nodes(data=True) if d["bipartite"] == 1]
    pos = nx.bipartite_layout(g, vnodes) if vnodes else nx.spring_layout(g, seed=0)
    fig = Figure(figsize=(6, 1 + 0.4 * max(len(vnodes), len(cnodes), 1)))
    ax = fig.add_subplot()
    nx.draw_networkx_edges(g, pos, ax=ax, alpha=0.5)
    nx.draw_networkx_nodes(g, pos, nodelist=vnodes, node_shape="o", node_color="tab:blue", ax=ax)
    nx.draw_networkx_nodes(g, pos, nodelist=cnodes, node_shape="s", node_color="tab:orange", ax=ax)
    nx.draw_networkx_labels(g, pos, labels={n: n.name for n in g.nodes}, font_size=7, ax=ax)
    ax.set_axis_off()
    fig.tight_layout()
    return fig


def save_figure(fig: Figure, path) -> None:
    fig.savefig(path, dpi=120)
