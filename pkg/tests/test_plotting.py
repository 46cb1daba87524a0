import matplotlib

matplotlib.use("Agg")

from cacs.plotting import gantt_figure, save_figure, topology_figure
from cacs.scheduling import LoadingPlan, read_tasks

from conftest import FIXTURES


def test_gantt_figure_has_bars_and_capacity_line(tmp_path):
    spec = read_tasks(FIXTURES / "ship8.tasks")
    plan = LoadingPlan({1: 0, 2: 0, 3: 3, 4: 3, 5: 7, 6: 5, 7: 10, 8: 12},
                       {1: 3, 2: 2, 3: 7, 4: 5, 5: 10, 6: 6, 7: 12, 8: 15}, 20)
    fig = gantt_figure(plan, spec)
    bars, load = fig.axes
    assert len(bars.collections) == 8
    assert any(line.get_ydata()[0] == spec.max_persons for line in load.lines)
    out = tmp_path / "g.png"
    save_figure(fig, out)
    assert out.read_bytes()[:4] == b"\x89PNG"


def test_topology_figure(trace_example, tmp_path):
    p, _ = trace_example
    fig = topology_figure(p)
    labels = {t.get_text() for t in fig.axes[0].texts}
    assert labels == {"A1", "A2", "A3", "C1", "C2"}
    save_figure(fig, tmp_path / "t.svg")
    assert (tmp_path / "t.svg").exists()
