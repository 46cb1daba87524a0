import subprocess
import sys

import pytest

from cacs.cli import main

from conftest import FIXTURES


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def test_solve_prints_solution(capsys):
    code, out, _ = run(capsys, "solve", FIXTURES / "example3.xml")
    assert code == 0
    assert out.splitlines()[1:] == ["x=0", "y=1", "z=2"]


def test_machine_output(capsys):
    code, out, _ = run(capsys, "solve", FIXTURES / "example3.xml", "--machine")
    assert (code, out) == (0, "x=0\ny=1\nz=2\n")


def test_no_solution_exit_code(capsys):
    code, out, _ = run(capsys, "solve", FIXTURES / "overconstrained.xml")
    assert code == 1
    assert out.startswith("NO SOLUTION (emptied:")


def test_malformed_input_exit_code(capsys):
    code, _, err = run(capsys, "solve", FIXTURES / "malformed.xml")
    assert code == 2 and "line 7" in err


def test_missing_file_and_bad_flags(capsys):
    assert run(capsys, "solve", FIXTURES / "nope.xml")[0] == 2
    assert run(capsys, "solve", FIXTURES / "example3.xml", "--seed", "-1")[0] == 2
    assert run(capsys, "frobnicate")[0] == 2


def test_listing_warning_goes_to_stderr(capsys):
    code, out, err = run(capsys, "solve", FIXTURES / "example5_listing.xml", "--machine")
    assert code == 0 and out == "x=3\ny=2\nz=1\n"
    assert "warning:" in err and "caagent" in err


def test_trace_and_replay(capsys, tmp_path):
    code, out, _ = run(capsys, "solve", FIXTURES / "example3.xml", "--trace", "--seed", "5")
    assert code == 0 and out.startswith("# seed=5\n")
    trace = tmp_path / "run.trace"
    trace.write_text(out.split("SOLUTION")[0])
    code, out, _ = run(capsys, "trace-replay", FIXTURES / "example3.xml", "--trace-file", trace)
    assert code == 0 and out.startswith("MATCH")

    lines = trace.read_text().splitlines()
    lines[2] = "99 tampered"
    trace.write_text("\n".join(lines) + "\n")
    code, out, _ = run(capsys, "trace-replay", FIXTURES / "example3.xml", "--trace-file", trace)
    assert code == 1 and "MISMATCH at line" in out


def test_verify(capsys):
    code, out, _ = run(capsys, "verify", FIXTURES / "example3.xml")
    assert (code, out) == (0, "AGREE: satisfiable\n")
    code, out, _ = run(capsys, "verify", FIXTURES / "overconstrained.xml")
    assert (code, out) == (0, "AGREE: unsatisfiable\n")
    code, out, _ = run(capsys, "verify", "--random", "30")
    assert code == 0 and out.endswith("30/30 instances agree\n")
    assert run(capsys, "verify")[0] == 2


def test_verify_cap(capsys):
    code, _, err = run(capsys, "verify", FIXTURES / "example5_listing.xml", "--cap", "10")
    assert code == 2 and "exceeds cap" in err


def test_demo_ship_loading(capsys, tmp_path):
    figure = tmp_path / "gantt.png"
    code, out, _ = run(capsys, "demo", "ship-loading", "--tasks", FIXTURES / "ship8.tasks",
                       "--gantt", "--figure", figure)
    assert code == 0
    assert "general_end=20 makespan=15" in out
    assert out.rstrip().endswith("verdict: FEASIBLE")
    chart = "".join(l + "\n" for l in out.splitlines() if "|" in l)
    assert chart == (FIXTURES / "ship8.gantt").read_text()
    assert figure.stat().st_size > 1000


def test_demo_errors(capsys):
    assert run(capsys, "demo", "ship-loading")[0] == 2
    assert run(capsys, "demo", "ship-loading", "--tasks", FIXTURES / "ship_cycle.tasks")[0] == 2
    code, out, _ = run(capsys, "demo", "ship-loading", "--tasks",
                       FIXTURES / "ship_area_infeasible.tasks")
    assert code == 1 and out == "NO SOLUTION\n"


def test_seed_from_environment(monkeypatch, capsys):
    monkeypatch.setenv("CACS_SEED", "9")
    code, out, _ = run(capsys, "solve", FIXTURES / "example3.xml", "--trace")
    assert out.startswith("# seed=9\n")


def test_machine_output_is_identical_across_processes():
    cmd = [sys.executable, "-m", "cacs.cli", "demo", "ship-loading", "--tasks",
           str(FIXTURES / "ship8.tasks"), "--machine", "--seed", "3"]
    outs = {subprocess.run(cmd, capture_output=True, check=True).stdout for _ in range(3)}
    assert len(outs) == 1


def test_solve_figure(capsys, tmp_path):
    figure = tmp_path / "topology.png"
    code, _, _ = run(capsys, "solve", FIXTURES / "example3.xml", "--figure", figure)
    assert code == 0 and figure.exists()
